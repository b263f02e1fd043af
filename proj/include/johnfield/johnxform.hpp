#pragma once

// John transform of a 3D density, its dual (the focal-stack model), the
// Fourier-domain inverse and the brightness/levels/rendering steps that turn
// an inverted focal stack into viewable images.

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "johnfield/lfcore.hpp"

namespace johnfield {

/// Line measure used when integrating along a ray. Euclidean integrates dm,
/// the arc length; AlongZ integrates dz. Only the AlongZ radiance satisfies
/// John's equation exactly, since dm = sqrt(1 + u^2 + v^2) dz depends on the
/// slope.
enum class LineMeasure { Euclidean, AlongZ };

struct ZRange {
  double z_min = 0.0;
  double z_max = 0.0;
};

using Density = std::function<double(double, double, double)>;

/// Trapezoid quadrature of f(x + u z, y + v z, z) over z in [z_min, z_max]
/// with step at most dz.
double john_ray_integral(const Density& f, const RayTwoPlane& ray, ZRange z, double dz,
                         LineMeasure measure = LineMeasure::Euclidean);

/// Forward John transform of a sampled volume: trilinear interpolation,
/// trapezoid rule with step vol.spacing(). Rays leaving the grid pick up
/// only the in-volume portion.
Lightfield forward_john(const VolumeGrid& vol, const LightfieldShape& shape, ZRange z,
                        LineMeasure measure = LineMeasure::Euclidean);

/// Forward John transform of a continuous density.
Lightfield forward_john(const Density& f, const LightfieldShape& shape, ZRange z, double dz,
                        LineMeasure measure = LineMeasure::Euclidean);

/// Average of 1/|p|^2 over the unit cube centered at the origin
/// (scripts/center_cell_average.py). A cell of side h averages C / h^2.
inline constexpr double kCenterCellAverage = 7.6741242224437320236;

/// r_check = (1 / 2 pi) (D^-2 * f): linear convolution with the sampled
/// kernel 1/|p|^2 (center cell replaced by its cell average), evaluated by
/// FFT on a grid zero-padded to twice the size along each axis.
VolumeGrid dual_transform_volume(const VolumeGrid& vol);

/// f = F^-1[ (1 / pi) |k| F[r_check] ] on the unpadded grid, |k| in angular
/// frequency units 2 pi m / (N spacing). The k = 0 component is removed.
VolumeGrid inverse_john(const VolumeGrid& rcheck);

/// Scalar factor making ||processed||_2 equal ||reference||_2.
/// Throws ZeroReference when the reference norm is zero.
double parseval_scale(std::span<const double> processed, std::span<const double> reference);
VolumeGrid parseval_rescale(const VolumeGrid& processed, const VolumeGrid& reference);

/// Nearest-rank percentile, pct in [0, 100].
double percentile(std::span<const double> values, double pct);

struct LevelsResult {
  std::vector<double> values;
  double lo = 0.0;           // input value mapped to 0
  double hi = 0.0;           // input value mapped to 1
  bool degenerate = false;   // lo == hi; values are all zero
};

/// Affine map sending the lo_pct percentile to 0 and hi_pct to 1, clamped to
/// [0, 1]. Percentiles use nearest rank, which makes the map idempotent.
LevelsResult percentile_levels(std::span<const double> values, double lo_pct = 5.0,
                               double hi_pct = 95.0);

struct FocalStackImages {
  std::vector<Image2D> layers;  // index 0 is the front layer
  double layer_spacing = 1.0;   // world z between adjacent layers
  double spacing_xy = 1.0;      // world units per pixel

  int size() const { return static_cast<int>(layers.size()); }
  /// Depth of layer i, centered on the middle of the stack.
  double layer_z(int i) const { return (i - 0.5 * (size() - 1)) * layer_spacing; }
  /// Throws InvalidArgument on an empty stack or mismatched layer sizes.
  void validate() const;
};

struct ViewCone {
  double max_slope = std::numeric_limits<double>::infinity();
};

/// Orthographic view along slopes (du, dv): layer i is sampled at
/// (x + du z_i, y + dv z_i) and composited with alpha 1/n, 1/(n-1), ..., 1
/// from front to back, so every layer contributes exactly 1/n.
/// Throws OutOfViewCone when |du| or |dv| exceeds the cone.
Image2D render_orthographic(const FocalStackImages& stack, double du, double dv,
                            ViewCone cone = {});

/// Layers become z slices (layer 0 at iz = 0) of an isotropic grid with
/// spacing spacing_xy.
VolumeGrid volume_from_stack(const FocalStackImages& stack);
FocalStackImages stack_from_volume(const VolumeGrid& vol, double layer_spacing);

}  // namespace johnfield
