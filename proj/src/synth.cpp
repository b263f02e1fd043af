#include "johnfield/synth.hpp"

#include <cmath>

#include "johnfield/parallel.hpp"

namespace johnfield {

BlobDensity::BlobDensity(std::vector<GaussianBlob> blobs) : blobs_(std::move(blobs)) {
  for (const auto& b : blobs_) {
    if (!(b.sigma > 0)) throw Error(ErrorKind::InvalidArgument, "blob sigma must be > 0");
    if (!(b.amplitude >= 0))
      throw Error(ErrorKind::InvalidArgument, "blob amplitude must be >= 0");
  }
}

double BlobDensity::operator()(double x, double y, double z) const {
  double acc = 0.0;
  for (const auto& b : blobs_) {
    const double dx = x - b.center.x, dy = y - b.center.y, dz = z - b.center.z;
    acc += b.amplitude * std::exp(-(dx * dx + dy * dy + dz * dz) / (2 * b.sigma * b.sigma));
  }
  return acc;
}

VolumeGrid gaussian_blob_volume(const GridSpec& grid, std::span<const GaussianBlob> blobs) {
  if (blobs.empty()) throw Error(ErrorKind::EmptyScene, "gaussian_blob_volume: no blobs");
  const BlobDensity density({blobs.begin(), blobs.end()});
  VolumeGrid vol(grid.nx, grid.ny, grid.nz, grid.spacing, grid.origin);
  parallel_for(static_cast<std::size_t>(grid.nz), [&](std::size_t iz) {
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix) {
        const Vec3 p = vol.world(ix, iy, static_cast<int>(iz));
        vol(ix, iy, static_cast<int>(iz)) = density(p.x, p.y, p.z);
      }
  });
  return vol;
}

Lightfield characteristic_lightfield(const PlaneFunction& g, double c,
                                     const LightfieldShape& shape) {
  Lightfield lf(shape);
  parallel_for(static_cast<std::size_t>(shape.nu) * shape.nv, [&](std::size_t m) {
    const int iu = static_cast<int>(m % shape.nu), iv = static_cast<int>(m / shape.nu);
    const double u = shape.u_at(iu), v = shape.v_at(iv);
    for (int iy = 0; iy < shape.ny; ++iy) {
      const double y = shape.y_at(iy);
      for (int ix = 0; ix < shape.nx; ++ix) lf(ix, iy, iu, iv) = g(shape.x_at(ix) - c * u, y - c * v);
    }
  });
  return lf;
}

double characteristic_xi_value(const PlaneFunction& g, double c, const XiPoint& p) {
  return g(-c * p.xi1 - c * p.xi2 + p.xi3 - p.xi4, p.xi1 - p.xi2 - c * p.xi3 - c * p.xi4);
}

XiField::XiField(const XiGridShape& shape) : shape_(shape) {
  std::size_t total = 1;
  for (int n : shape.n) {
    if (n <= 0) throw Error(ErrorKind::InvalidArgument, "XiField: counts must be positive");
    total *= static_cast<std::size_t>(n);
  }
  if (!(shape.spacing > 0)) throw Error(ErrorKind::InvalidArgument, "XiField: spacing must be > 0");
  data_.assign(total, 0.0);
}

std::size_t XiField::index(const std::array<int, 4>& i) const {
  const auto& n = shape_.n;
  return ((static_cast<std::size_t>(i[0]) * n[1] + i[1]) * n[2] + i[2]) * n[3] + i[3];
}

XiPoint XiField::point(const std::array<int, 4>& i) const {
  const auto& o = shape_.origin;
  const double h = shape_.spacing;
  return {o[0] + i[0] * h, o[1] + i[1] * h, o[2] + i[2] * h, o[3] + i[3] * h};
}

XiField characteristic_xifield(const PlaneFunction& g, double c, const XiGridShape& shape) {
  XiField field(shape);
  const auto& n = shape.n;
  for (int a = 0; a < n[0]; ++a)
    for (int b = 0; b < n[1]; ++b)
      for (int d = 0; d < n[2]; ++d)
        for (int e = 0; e < n[3]; ++e) {
          const std::array<int, 4> i{a, b, d, e};
          field[i] = characteristic_xi_value(g, c, field.point(i));
        }
  return field;
}

void Texture::sample(double a, double b, double& color, double& coverage) const {
  const double tx = a / spacing + 0.5 * (image.width - 1);
  const double ty = b / spacing + 0.5 * (image.height - 1);
  if (!bilinear(image.data, image.width, image.height, tx, ty, color)) {
    coverage = 0.0;
    return;
  }
  if (alpha)
    bilinear(alpha->data, alpha->width, alpha->height, tx, ty, coverage);
  else
    coverage = 1.0;
}

Lightfield layered_scene_lightfield(std::span<const SceneLayer> layers,
                                    const LightfieldShape& shape) {
  for (const auto& layer : layers) {
    if (!(layer.opacity >= 0 && layer.opacity <= 1))
      throw Error(ErrorKind::InvalidArgument, "layer opacity must be in [0, 1]");
    if (layer.texture.alpha && (layer.texture.alpha->width != layer.texture.image.width ||
                                layer.texture.alpha->height != layer.texture.image.height))
      throw Error(ErrorKind::InvalidArgument, "layer alpha must match texture size");
  }
  Lightfield lf(shape);
  parallel_for(static_cast<std::size_t>(shape.nu) * shape.nv, [&](std::size_t m) {
    const int iu = static_cast<int>(m % shape.nu), iv = static_cast<int>(m / shape.nu);
    const double u = shape.u_at(iu), v = shape.v_at(iv);
    for (int iy = 0; iy < shape.ny; ++iy) {
      const double y = shape.y_at(iy);
      for (int ix = 0; ix < shape.nx; ++ix) {
        const double x = shape.x_at(ix);
        double acc = 0.0;
        for (const auto& layer : layers) {
          const double c = layer.disparity_c;
          double color = 0, coverage = 0;
          layer.texture.sample(x - c * u, y - c * v, color, coverage);
          const double a = layer.opacity * coverage;
          acc = a * color + (1.0 - a) * acc;
        }
        lf(ix, iy, iu, iv) = acc;
      }
    }
  });
  return lf;
}

}  // namespace johnfield
