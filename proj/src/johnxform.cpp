#include "johnfield/johnxform.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "johnfield/fft.hpp"
#include "johnfield/parallel.hpp"

namespace johnfield {
namespace {

double measure_factor(const RayTwoPlane& ray, LineMeasure measure) {
  return measure == LineMeasure::Euclidean ? std::sqrt(1.0 + ray.u * ray.u + ray.v * ray.v)
                                           : 1.0;
}

template <class Sampler>
double trapezoid_along_ray(const Sampler& f, const RayTwoPlane& ray, ZRange z, double dz) {
  const double length = z.z_max - z.z_min;
  if (!(length > 0)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil(length / dz - 1e-9)));
  const double h = length / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double zk = z.z_min + k * h;
    const double w = (k == 0 || k == n) ? 0.5 : 1.0;
    acc += w * f(ray.x + ray.u * zk, ray.y + ray.v * zk, zk);
  }
  return acc * h;
}

template <class Sampler>
Lightfield forward_impl(const Sampler& f, const LightfieldShape& shape, ZRange z, double dz,
                        LineMeasure measure) {
  if (!(dz > 0)) throw Error(ErrorKind::InvalidArgument, "forward_john: dz must be > 0");
  Lightfield lf(shape);
  parallel_for(static_cast<std::size_t>(shape.nu) * shape.nv, [&](std::size_t m) {
    const int iu = static_cast<int>(m % shape.nu), iv = static_cast<int>(m / shape.nu);
    for (int iy = 0; iy < shape.ny; ++iy)
      for (int ix = 0; ix < shape.nx; ++ix) {
        const RayTwoPlane ray{shape.x_at(ix), shape.y_at(iy), shape.u_at(iu), shape.v_at(iv)};
        lf(ix, iy, iu, iv) =
            measure_factor(ray, measure) * trapezoid_along_ray(f, ray, z, dz);
      }
  });
  return lf;
}

std::vector<std::complex<double>> to_complex(std::span<const double> v) {
  return {v.begin(), v.end()};
}

}  // namespace

double john_ray_integral(const Density& f, const RayTwoPlane& ray, ZRange z, double dz,
                         LineMeasure measure) {
  if (!(dz > 0)) throw Error(ErrorKind::InvalidArgument, "john_ray_integral: dz must be > 0");
  return measure_factor(ray, measure) * trapezoid_along_ray(f, ray, z, dz);
}

Lightfield forward_john(const VolumeGrid& vol, const LightfieldShape& shape, ZRange z,
                        LineMeasure measure) {
  auto sampler = [&vol](double x, double y, double zz) { return vol.sample(x, y, zz); };
  return forward_impl(sampler, shape, z, vol.spacing(), measure);
}

Lightfield forward_john(const Density& f, const LightfieldShape& shape, ZRange z, double dz,
                        LineMeasure measure) {
  return forward_impl(f, shape, z, dz, measure);
}

VolumeGrid dual_transform_volume(const VolumeGrid& vol) {
  const int nx = vol.nx(), ny = vol.ny(), nz = vol.nz();
  const int mx = 2 * nx, my = 2 * ny, mz = 2 * nz;
  const std::size_t padded = static_cast<std::size_t>(mx) * my * mz;
  const double h = vol.spacing();
  auto at = [&](int x, int y, int z) { return (static_cast<std::size_t>(z) * my + y) * mx + x; };

  std::vector<std::complex<double>> signal(padded);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) signal[at(x, y, z)] = vol(x, y, z);

  // Kernel weight per offset d: h^3 / (2 pi) * 1 / (h^2 |d|^2). Offsets span
  // [-(n-1), n-1]; the slot at +-n stays zero so the product is a linear
  // convolution.
  std::vector<std::complex<double>> kernel(padded);
  const double scale = h / (2.0 * std::numbers::pi);
  for (int dz = -(nz - 1); dz <= nz - 1; ++dz)
    for (int dy = -(ny - 1); dy <= ny - 1; ++dy)
      for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
        const int r2 = dx * dx + dy * dy + dz * dz;
        const double k = r2 == 0 ? kCenterCellAverage : 1.0 / r2;
        kernel[at((dx + mx) % mx, (dy + my) % my, (dz + mz) % mz)] = scale * k;
      }

  const int dims[3] = {mz, my, mx};
  fft::transform(signal, dims, fft::Direction::Forward);
  fft::transform(kernel, dims, fft::Direction::Forward);
  for (std::size_t i = 0; i < padded; ++i) signal[i] *= kernel[i];
  fft::transform(signal, dims, fft::Direction::Inverse);

  const double norm = 1.0 / static_cast<double>(padded);
  std::vector<double> out(vol.size());
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) out[vol.index(x, y, z)] = signal[at(x, y, z)].real() * norm;
  return vol.with_data(std::move(out));
}

VolumeGrid inverse_john(const VolumeGrid& rcheck) {
  const int nx = rcheck.nx(), ny = rcheck.ny(), nz = rcheck.nz();
  auto spectrum = to_complex(rcheck.data());
  const int dims[3] = {nz, ny, nx};
  fft::transform(spectrum, dims, fft::Direction::Forward);

  const double two_pi = 2.0 * std::numbers::pi;
  const double h = rcheck.spacing();
  for (int z = 0; z < nz; ++z) {
    const double kz = two_pi * fft::signed_bin(z, nz) / (nz * h);
    for (int y = 0; y < ny; ++y) {
      const double ky = two_pi * fft::signed_bin(y, ny) / (ny * h);
      for (int x = 0; x < nx; ++x) {
        const double kx = two_pi * fft::signed_bin(x, nx) / (nx * h);
        const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
        spectrum[rcheck.index(x, y, z)] *= k / std::numbers::pi;
      }
    }
  }
  fft::transform(spectrum, dims, fft::Direction::Inverse);
  const double norm = 1.0 / static_cast<double>(spectrum.size());
  std::vector<double> out(spectrum.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spectrum[i].real() * norm;
  return rcheck.with_data(std::move(out));
}

double parseval_scale(std::span<const double> processed, std::span<const double> reference) {
  const double ref = std::sqrt(std::inner_product(reference.begin(), reference.end(),
                                                  reference.begin(), 0.0));
  if (!(ref > 0)) throw Error(ErrorKind::ZeroReference, "parseval_rescale: zero reference norm");
  const double proc = std::sqrt(std::inner_product(processed.begin(), processed.end(),
                                                   processed.begin(), 0.0));
  if (!(proc > 0))
    throw Error(ErrorKind::InvalidArgument, "parseval_rescale: processed signal is zero");
  return ref / proc;
}

VolumeGrid parseval_rescale(const VolumeGrid& processed, const VolumeGrid& reference) {
  const double s = parseval_scale(processed.data(), reference.data());
  std::vector<double> out(processed.data().begin(), processed.data().end());
  for (double& v : out) v *= s;
  return processed.with_data(std::move(out));
}

double percentile(std::span<const double> values, double pct) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "percentile: empty input");
  if (!(pct >= 0 && pct <= 100)) throw Error(ErrorKind::InvalidArgument, "percentile: pct out of [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::llround(pct / 100.0 * (v.size() - 1)));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank), v.end());
  return v[rank];
}

LevelsResult percentile_levels(std::span<const double> values, double lo_pct, double hi_pct) {
  if (!(lo_pct < hi_pct))
    throw Error(ErrorKind::InvalidArgument, "percentile_levels: lo_pct must be < hi_pct");
  LevelsResult r;
  r.lo = percentile(values, lo_pct);
  r.hi = percentile(values, hi_pct);
  r.values.assign(values.size(), 0.0);
  if (!(r.hi > r.lo)) {
    r.degenerate = true;
    return r;
  }
  const double inv = 1.0 / (r.hi - r.lo);
  for (std::size_t i = 0; i < values.size(); ++i)
    r.values[i] = std::clamp((values[i] - r.lo) * inv, 0.0, 1.0);
  return r;
}

void FocalStackImages::validate() const {
  if (layers.empty()) throw Error(ErrorKind::InvalidArgument, "focal stack has no layers");
  for (const auto& l : layers)
    if (l.width != layers.front().width || l.height != layers.front().height)
      throw Error(ErrorKind::InvalidArgument, "focal stack layers differ in size");
  if (!(spacing_xy > 0) || !(layer_spacing > 0))
    throw Error(ErrorKind::InvalidArgument, "focal stack spacings must be > 0");
}

Image2D render_orthographic(const FocalStackImages& stack, double du, double dv,
                            ViewCone cone) {
  stack.validate();
  if (std::abs(du) > cone.max_slope || std::abs(dv) > cone.max_slope)
    throw Error(ErrorKind::OutOfViewCone, "view direction outside the configured cone");
  const int n = stack.size();
  const int w = stack.layers.front().width, h = stack.layers.front().height;
  Image2D out(w, h);
  // Back-to-front "over": the back layer has alpha 1, layer i has 1/(n-i).
  for (int i = n - 1; i >= 0; --i) {
    const double alpha = 1.0 / (n - i);
    const double sx = du * stack.layer_z(i) / stack.spacing_xy;
    const double sy = dv * stack.layer_z(i) / stack.spacing_xy;
    const Image2D& layer = stack.layers[static_cast<std::size_t>(i)];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double value = (sx == 0 && sy == 0) ? layer(x, y) : layer.sample(x + sx, y + sy);
        out(x, y) = alpha * value + (1.0 - alpha) * out(x, y);
      }
  }
  return out;
}

VolumeGrid volume_from_stack(const FocalStackImages& stack) {
  stack.validate();
  const int w = stack.layers.front().width, h = stack.layers.front().height;
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(w) * h * stack.layers.size());
  for (const auto& l : stack.layers) data.insert(data.end(), l.data.begin(), l.data.end());
  return VolumeGrid(w, h, stack.size(), stack.spacing_xy, {}, std::move(data));
}

FocalStackImages stack_from_volume(const VolumeGrid& vol, double layer_spacing) {
  FocalStackImages stack;
  stack.layer_spacing = layer_spacing;
  stack.spacing_xy = vol.spacing();
  const std::size_t slice = static_cast<std::size_t>(vol.nx()) * vol.ny();
  for (int z = 0; z < vol.nz(); ++z) {
    auto first = vol.data().begin() + static_cast<std::ptrdiff_t>(z * slice);
    stack.layers.emplace_back(vol.nx(), vol.ny(),
                              std::vector<double>(first, first + static_cast<std::ptrdiff_t>(slice)));
  }
  return stack;
}

}  // namespace johnfield
