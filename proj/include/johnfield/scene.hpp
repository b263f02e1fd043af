#pragma once

// Declarative TOML scene specs for the synth command.
//
//   version = 1
//   kind = "layers"            # or "blobs"
//   seed = 7
//
//   [lightfield]               # layers (and blobs rendered to a lightfield)
//   nu = 9  nv = 9  nx = 96  ny = 96  pitch_uv = 1.0  pitch_xy = 1.0
//
//   [[layer]]                  # back to front
//   disparity = 1.0
//   opacity = 1.0
//   texture = { kind = "noise", width = 160, height = 160, smoothness = 2.0 }
//   # texture = { path = "wall.png", spacing = 1.0 }
//   mask = { kind = "halfplane", normal = [1.0, 0.0], offset = 0.0 }
//   # mask = { kind = "rect", min = [-10.0, -10.0], max = [10.0, 10.0] }
//
//   [volume]                   # blobs
//   nx = 32  ny = 32  nz = 32  spacing = 1.0  origin = [-15.5, -15.5, -15.5]
//
//   [[blob]]
//   center = [0.0, 0.0, 0.0]  sigma = 2.0  amplitude = 1.0

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "johnfield/lfcore.hpp"
#include "johnfield/synth.hpp"

namespace johnfield {

enum class SceneKind { Layers, Blobs };

struct SceneSpec {
  int version = 1;
  SceneKind kind = SceneKind::Layers;
  std::uint64_t seed = 0;
  std::optional<LightfieldShape> lightfield;
  std::vector<SceneLayer> layers;  // back to front
  std::optional<GridSpec> volume;
  std::vector<GaussianBlob> blobs;
};

inline constexpr int kSceneVersion = 1;

/// Parses TOML text. Relative texture paths resolve against `base_dir`.
/// Errors are Format, with "line N" and the dotted field name when known.
SceneSpec parse_scene(const std::string& text, const std::filesystem::path& base_dir,
                      const std::string& source_name = "scene");
SceneSpec load_scene(const std::filesystem::path& path);

}  // namespace johnfield
