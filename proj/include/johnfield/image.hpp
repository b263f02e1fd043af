#pragma once

#include <cstdint>

#include "johnfield/lfcore.hpp"

namespace johnfield {

/// sRGB transfer curve (IEC 61966-2-1), values in [0, 1].
double srgb_to_linear(double encoded);
double linear_to_srgb(double linear);

/// Rec.709 luminance of linear RGB.
inline double luminance709(double r, double g, double b) {
  return 0.2126 * r + 0.7152 * g + 0.0722 * b;
}

/// Bilinear resize with pixel-center alignment and clamped edges.
Image2D resample_bilinear(const Image2D& src, int width, int height);

/// Separable Gaussian blur, zero-padded borders renormalized by kernel mass.
Image2D gaussian_blur(const Image2D& src, double sigma);

/// Band-limited random texture: white Gaussian noise blurred by `smoothness`
/// pixels, rescaled to [0, 1]. Deterministic for a given seed.
Image2D noise_texture(int width, int height, double smoothness, std::uint64_t seed);

}  // namespace johnfield
