#include "johnfield/depth.hpp"

#include <algorithm>
#include <cmath>

#include "johnfield/image.hpp"
#include "johnfield/parallel.hpp"

namespace johnfield {
namespace {

struct ApertureRange {
  int u0, v0, b;
  double uc, vc;
};

ApertureRange aperture_range(const LightfieldShape& s, int b) {
  if (b < 1 || b > std::min(s.nu, s.nv))
    throw Error(ErrorKind::InvalidArgument, "blend aperture B must be in [1, min(nu, nv)]");
  return {(s.nu - b) / 2, (s.nv - b) / 2, b, 0.5 * (s.nu - 1), 0.5 * (s.nv - 1)};
}

// Bilinear sample that fails when any pixel with nonzero weight is invalid.
bool bilinear_masked(std::span<const double> plane, std::span<const unsigned char> mask,
                     int width, int height, double x, double y, double& out) {
  if (!bilinear(plane, width, height, x, y, out)) return false;
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const bool fx = x > x0, fy = y > y0;
  const std::size_t w = static_cast<std::size_t>(width);
  auto ok = [&](int px, int py) { return mask[py * w + px] != 0; };
  if (!ok(x0, y0)) return false;
  if (fx && !ok(x0 + 1, y0)) return false;
  if (fy && !ok(x0, y0 + 1)) return false;
  if (fx && fy && !ok(x0 + 1, y0 + 1)) return false;
  return true;
}

std::vector<unsigned char> resample_mask(const std::vector<unsigned char>& mask, int sw, int sh,
                                         int width, int height) {
  if (sw == width && sh == height) return mask;
  std::vector<unsigned char> out(static_cast<std::size_t>(width) * height, 0);
  const double sx = static_cast<double>(sw) / width, sy = static_cast<double>(sh) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, sh - 1.0);
    const int y0 = static_cast<int>(fy), y1 = std::min(y0 + 1, sh - 1);
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, sw - 1.0);
      const int x0 = static_cast<int>(fx), x1 = std::min(x0 + 1, sw - 1);
      auto m = [&](int px, int py) { return mask[static_cast<std::size_t>(py) * sw + px]; };
      out[static_cast<std::size_t>(y) * width + x] = m(x0, y0) && m(x1, y0) && m(x0, y1) && m(x1, y1);
    }
  }
  return out;
}

}  // namespace

void FocusStack::validate() const {
  if (n_steps < 2) throw Error(ErrorKind::InvalidArgument, "focus stack needs >= 2 frames");
  if (!(f_min < f_max)) throw Error(ErrorKind::InvalidArgument, "focus stack needs f_min < f_max");
  if (frames.size() != frame_size() * n_steps || valid.size() != frames.size())
    throw Error(ErrorKind::InvalidArgument, "focus stack frame storage mismatch");
}

Image2D blend_render(const Lightfield& lf, double focus_shift, int aperture) {
  const ApertureRange a = aperture_range(lf.shape(), aperture);
  const int nx = lf.nx(), ny = lf.ny();
  Image2D out(nx, ny);
  std::vector<int> count(static_cast<std::size_t>(nx) * ny, 0);
  for (int iv = a.v0; iv < a.v0 + a.b; ++iv)
    for (int iu = a.u0; iu < a.u0 + a.b; ++iu) {
      const auto plane = lf.microimage(iu, iv);
      const double sx = focus_shift * (iu - a.uc), sy = focus_shift * (iv - a.vc);
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          double value;
          if (!bilinear(plane, nx, ny, x + sx, y + sy, value)) continue;
          out(x, y) += value;
          ++count[static_cast<std::size_t>(y) * nx + x];
        }
    }
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = count[i] ? out.data[i] / count[i] : 0.0;
  return out;
}

BlendResult blend_render(const FilteredLightfield& lf, double focus_shift, int aperture) {
  const Lightfield& values = lf.values;
  const ApertureRange a = aperture_range(values.shape(), aperture);
  const int nx = values.nx(), ny = values.ny();
  const std::size_t plane_size = static_cast<std::size_t>(nx) * ny;
  BlendResult r{Image2D(nx, ny), std::vector<unsigned char>(plane_size, 1)};
  for (int iv = a.v0; iv < a.v0 + a.b; ++iv)
    for (int iu = a.u0; iu < a.u0 + a.b; ++iu) {
      const auto plane = values.microimage(iu, iv);
      const std::span<const unsigned char> mask(lf.valid.data() + values.index(0, 0, iu, iv),
                                                plane_size);
      const double sx = focus_shift * (iu - a.uc), sy = focus_shift * (iv - a.vc);
      for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
          const std::size_t p = static_cast<std::size_t>(y) * nx + x;
          if (!r.valid[p]) continue;
          double value;
          if (!bilinear_masked(plane, mask, nx, ny, x + sx, y + sy, value)) {
            r.valid[p] = 0;
            continue;
          }
          r.image.data[p] += value;
        }
    }
  const double inv = 1.0 / (static_cast<double>(a.b) * a.b);
  for (std::size_t p = 0; p < plane_size; ++p) r.image.data[p] = r.valid[p] ? r.image.data[p] * inv : 0.0;
  return r;
}

int max_valid_aperture(const Lightfield& lf, const Stencil4D& stencil) {
  const auto reach = stencil.reach();
  return std::min(lf.nu() - 2 * reach[2], lf.nv() - 2 * reach[3]);
}

FocusStack kernel_focus_stack(const Lightfield& lf, const Stencil4D& stencil,
                              const FocusStackOptions& opt) {
  if (opt.steps < 2) throw Error(ErrorKind::InvalidArgument, "focus stack needs >= 2 steps");
  if (!(opt.f_min < opt.f_max)) throw Error(ErrorKind::InvalidArgument, "focus stack needs f_min < f_max");
  if (opt.out_width <= 0 || opt.out_height <= 0)
    throw Error(ErrorKind::InvalidArgument, "focus stack output size must be positive");
  const int widest = max_valid_aperture(lf, stencil);
  if (widest < 1) throw Error(ErrorKind::StencilTooLarge, "stencil leaves no valid microimage");
  const int b = opt.aperture > 0 ? opt.aperture : widest;
  const ApertureRange a = aperture_range(lf.shape(), b);

  FocusStack stack;
  stack.n_steps = opt.steps;
  stack.f_min = opt.f_min;
  stack.f_max = opt.f_max;
  stack.width = opt.out_width;
  stack.height = opt.out_height;
  stack.frames.resize(stack.frame_size() * opt.steps);
  stack.valid.resize(stack.frames.size());

  for (int i = 0; i < opt.steps; ++i) {
    const double f = stack.focus(i);
    FilteredLightfield filtered =
        apply_stencil_region(lf, stencil, f, a.u0, a.u0 + a.b, a.v0, a.v0 + a.b, opt.interpolation);
    for (double& v : filtered.values.data()) v = std::abs(v);
    const BlendResult blend = blend_render(filtered, f, b);
    const Image2D frame = resample_bilinear(blend.image, opt.out_width, opt.out_height);
    const auto mask = resample_mask(blend.valid, lf.nx(), lf.ny(), opt.out_width, opt.out_height);
    const std::size_t base = i * stack.frame_size();
    for (std::size_t p = 0; p < stack.frame_size(); ++p) {
      stack.frames[base + p] = static_cast<float>(frame.data[p]);
      stack.valid[base + p] = mask[p];
    }
  }
  return stack;
}

std::size_t profile_argmin(std::span<const double> profile) {
  return static_cast<std::size_t>(std::min_element(profile.begin(), profile.end()) - profile.begin());
}

TroughWidth trough_width(std::span<const double> profile, double fraction) {
  if (profile.size() < 2) throw Error(ErrorKind::InvalidArgument, "trough_width: need >= 2 samples");
  const auto [lo_it, hi_it] = std::minmax_element(profile.begin(), profile.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return {1.0, true};
  const double threshold = lo + fraction * (hi - lo);
  const double step = 1.0 / static_cast<double>(profile.size() - 1);
  double width = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const double a = profile[i], b = profile[i + 1];
    if (a <= threshold && b <= threshold) {
      width += step;
    } else if (a <= threshold) {
      width += step * (threshold - a) / (b - a);
    } else if (b <= threshold) {
      width += step * (threshold - b) / (a - b);
    }
  }
  return {std::min(width, 1.0), false};
}

namespace {

template <class PerPixel>
PixelMap per_pixel(const FocusStack& stack, PerPixel&& fn) {
  stack.validate();
  PixelMap map;
  map.width = stack.width;
  map.height = stack.height;
  const std::size_t n_pix = stack.frame_size();
  map.values.assign(n_pix, 0.0);
  map.valid.assign(n_pix, 0);
  map.flat.assign(n_pix, 0);
  parallel_for(static_cast<std::size_t>(stack.height), [&](std::size_t row) {
    std::vector<double> profile(static_cast<std::size_t>(stack.n_steps));
    for (int x = 0; x < stack.width; ++x) {
      const std::size_t p = row * stack.width + x;
      bool valid = true;
      for (int i = 0; i < stack.n_steps; ++i) {
        profile[static_cast<std::size_t>(i)] = stack.frames[i * n_pix + p];
        valid = valid && stack.valid[i * n_pix + p];
      }
      const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
      map.flat[p] = !(*hi > *lo);
      map.valid[p] = valid;
      map.values[p] = fn(std::span<const double>(profile));
    }
  });
  return map;
}

}  // namespace

DepthMap depth_from_stack(const FocusStack& stack) {
  const double denom = static_cast<double>(stack.n_steps - 1);
  return per_pixel(stack, [&](std::span<const double> profile) {
    return static_cast<double>(profile_argmin(profile)) / denom;
  });
}

UncertaintyMap uncertainty_from_stack(const FocusStack& stack, double fraction) {
  return per_pixel(stack, [&](std::span<const double> profile) {
    return trough_width(profile, fraction).width;
  });
}

}  // namespace johnfield
