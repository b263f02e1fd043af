#pragma once

// Synthetic ground truth: Gaussian-blob volumes, exact characteristic
// solutions of John's equation, and layered parallax scenes.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "johnfield/lfcore.hpp"

namespace johnfield {

struct GaussianBlob {
  Vec3 center;
  double sigma = 1.0;
  double amplitude = 1.0;
};

struct GridSpec {
  int nx = 1, ny = 1, nz = 1;
  double spacing = 1.0;
  Vec3 origin{};
};

/// Continuous density f(p) = sum_i a_i exp(-|p - c_i|^2 / (2 sigma_i^2)).
class BlobDensity {
 public:
  explicit BlobDensity(std::vector<GaussianBlob> blobs);
  double operator()(double x, double y, double z) const;
  const std::vector<GaussianBlob>& blobs() const { return blobs_; }

 private:
  std::vector<GaussianBlob> blobs_;
};

/// Samples BlobDensity at voxel centers. Throws EmptyScene for no blobs.
VolumeGrid gaussian_blob_volume(const GridSpec& grid, std::span<const GaussianBlob> blobs);

/// g(a, b) of the characteristic family r = g(x - c u, y - c v).
using PlaneFunction = std::function<double(double, double)>;

/// r(x, y, u, v) = g(x - c u, y - c v) at the lightfield's world coordinates.
Lightfield characteristic_lightfield(const PlaneFunction& g, double c,
                                     const LightfieldShape& shape);

/// Same solution written in xi coordinates:
/// g(-c xi1 - c xi2 + xi3 - xi4, xi1 - xi2 - c xi3 - c xi4).
double characteristic_xi_value(const PlaneFunction& g, double c, const XiPoint& xi);

struct XiGridShape {
  std::array<int, 4> n{1, 1, 1, 1};  // counts along xi1..xi4
  double spacing = 1.0;
  std::array<double, 4> origin{};    // xi of sample (0, 0, 0, 0)
};

/// Regular grid over (xi1, xi2, xi3, xi4), xi1 slowest.
class XiField {
 public:
  explicit XiField(const XiGridShape& shape);
  const XiGridShape& shape() const { return shape_; }
  std::size_t index(const std::array<int, 4>& i) const;
  double& operator[](const std::array<int, 4>& i) { return data_[index(i)]; }
  double operator[](const std::array<int, 4>& i) const { return data_[index(i)]; }
  XiPoint point(const std::array<int, 4>& i) const;
  std::span<const double> data() const { return data_; }

 private:
  XiGridShape shape_;
  std::vector<double> data_;
};

XiField characteristic_xifield(const PlaneFunction& g, double c, const XiGridShape& shape);

/// Texture placed on a fronto-parallel plane. Texel (tx, ty) sits at world
/// ((tx - (w-1)/2) spacing, (ty - (h-1)/2) spacing). Reads outside the texture
/// are black and fully transparent. `alpha`, when present, is a per-texel
/// coverage in [0, 1] with the same size as `image`.
struct Texture {
  Image2D image;
  double spacing = 1.0;
  std::optional<Image2D> alpha;

  /// Bilinear color and coverage at world (a, b).
  void sample(double a, double b, double& color, double& coverage) const;
};

struct SceneLayer {
  double disparity_c = 0.0;
  Texture texture;
  double opacity = 1.0;
};

/// Back-to-front straight-alpha composite of characteristic lightfields:
/// layer i contributes T_i(x - c_i u, y - c_i v) a_i prod_{nearer j}(1 - a_j),
/// with a_i = opacity_i * coverage_i. layers[0] is the farthest.
Lightfield layered_scene_lightfield(std::span<const SceneLayer> layers,
                                    const LightfieldShape& shape);

}  // namespace johnfield
