#pragma once

// On-disk formats. A lightfield (.lfr) or volume (.vol) is a key: value text
// manifest plus a raw little-endian float32 payload in the index order of the
// in-memory type. Images are PNG.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "johnfield/lfcore.hpp"

namespace johnfield::io {

namespace fs = std::filesystem;

/// Parsed "key: value" manifest. Throws Format with the offending line.
std::map<std::string, std::string> read_manifest(const fs::path& path);

/// Payload path for a manifest: "<manifest>.f32" next to it.
fs::path payload_path(const fs::path& manifest);

void write_lightfield(const fs::path& manifest, const Lightfield& lf);
Lightfield read_lightfield(const fs::path& manifest);

void write_volume(const fs::path& manifest, const VolumeGrid& vol);
VolumeGrid read_volume(const fs::path& manifest);

void write_f32(const fs::path& path, std::span<const double> values);
void write_f32(const fs::path& path, std::span<const float> values);
std::vector<double> read_f32(const fs::path& path, std::size_t expected_count);

/// Decodes 8/16-bit gray, gray+alpha, RGB or RGBA. Color is treated as sRGB
/// and reduced to linear Rec.709 luminance; 16-bit gray is read as linear.
Image2D read_png(const fs::path& path);

/// 8-bit gray, linear values in [0, 1] encoded with the sRGB curve.
void write_png_srgb(const fs::path& path, const Image2D& img);
/// 16-bit gray, linear values in [0, 1] stored without a transfer curve.
void write_png16(const fs::path& path, const Image2D& img);

}  // namespace johnfield::io
