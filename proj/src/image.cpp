#include "johnfield/image.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace johnfield {

double srgb_to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double l) {
  l = std::clamp(l, 0.0, 1.0);
  return l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

Image2D resample_bilinear(const Image2D& src, int width, int height) {
  if (width == src.width && height == src.height) return src;
  Image2D out(width, height);
  const double sx = static_cast<double>(src.width) / width;
  const double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
      out(x, y) = src.sample(fx, fy);
    }
  }
  return out;
}

Image2D gaussian_blur(const Image2D& src, double sigma) {
  if (!(sigma > 0)) return src;
  const int radius = static_cast<int>(std::ceil(3.5 * sigma));
  std::vector<double> k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));

  auto pass = [&](const Image2D& in, bool horizontal) {
    Image2D out(in.width, in.height);
    for (int y = 0; y < in.height; ++y) {
      for (int x = 0; x < in.width; ++x) {
        double acc = 0, mass = 0;
        for (int i = -radius; i <= radius; ++i) {
          const int sx = horizontal ? x + i : x;
          const int sy = horizontal ? y : y + i;
          if (sx < 0 || sy < 0 || sx >= in.width || sy >= in.height) continue;
          acc += k[i + radius] * in(sx, sy);
          mass += k[i + radius];
        }
        out(x, y) = acc / mass;
      }
    }
    return out;
  };
  return pass(pass(src, true), false);
}

Image2D noise_texture(int width, int height, double smoothness, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Image2D img(width, height);
  for (double& v : img.data) v = normal(rng);
  img = gaussian_blur(img, smoothness);
  const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
  const double a = *lo, span = *hi - *lo;
  for (double& v : img.data) v = span > 0 ? (v - a) / span : 0.0;
  return img;
}

}  // namespace johnfield
