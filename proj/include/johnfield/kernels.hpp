#pragma once

// Discrete stencils for John's equation and the ultrahyperbolic equation,
// including the Asgeirsson mean-value kernels, and their application to
// lightfields with focus-compensating microimage shifts.

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "johnfield/lfcore.hpp"

namespace johnfield {

enum class LaplacianVariant { FivePoint, NinePoint };

/// (2k+1) x (2k+1) weights, row-major, center at (k, k).
struct Stencil2D {
  int half = 1;
  std::vector<double> weights;
  double scale = 1.0;  // weights * scale / eps^2 approximates the operator

  double at(int dx, int dy) const {
    return weights[static_cast<std::size_t>(dy + half) * (2 * half + 1) + (dx + half)];
  }
};

Stencil2D laplacian2d(LaplacianVariant variant);

/// Coordinate frame of a 4D stencil's tap offsets.
enum class StencilFrame {
  Xi,          // offsets (d_xi1, d_xi2, d_xi3, d_xi4)
  Lightfield,  // offsets (dx, dy, du, dv) in sample-index units
};

struct Tap {
  std::array<int, 4> offset{};
  double weight = 0.0;
  bool operator==(const Tap&) const = default;
};

/// Sparse 4D kernel. Weights are kept in smallest-integer form; `scale` holds
/// the factor that turns the raw weighted sum into the continuous operator at
/// unit sample spacing (divide by eps^2 for spacing eps).
struct Stencil4D {
  std::vector<Tap> taps;  // sorted by offset, offsets unique, no zero weights
  double scale = 1.0;
  StencilFrame frame = StencilFrame::Lightfield;
  std::string provenance;

  double weight_sum() const;
  /// Largest |offset| per axis.
  std::array<int, 4> reach() const;
};

/// Sorts taps, merges coincident offsets by summing weights and drops zeros.
Stencil4D canonicalize(Stencil4D s);

/// Maps a xi-frame stencil into lightfield offsets:
/// x = xi3 - xi4, y = xi1 - xi2, u = xi1 + xi2, v = xi3 + xi4.
Stencil4D to_lightfield_frame(const Stencil4D& xi_stencil);

/// Delta_14 - Delta_23 in xi coordinates: the Laplacian embedded with weight
/// +1 in the (xi1, xi4) plane and -1 in the (xi2, xi3) plane.
Stencil4D ultrahyperbolic_stencil(LaplacianVariant variant);

/// The ultrahyperbolic stencil in (x, y, u, v); approximates
/// 4 (d_y d_u - d_x d_v) times eps^2 / scale.
Stencil4D john_stencil(LaplacianVariant variant);

/// Four-point samplings of the radius-R circles of the mean-value theorem:
/// +1 on the (xi1, xi4) circle, -1 on the (xi2, xi3) circle.
Stencil4D asg_t1_stencil(int radius);

/// 4 x 4 product sampling of the two-circle theorem: +1 with (R1, R2) in the
/// ((xi1, xi4), (xi2, xi3)) planes, -1 with the radii swapped.
/// Throws DegenerateRadii when r1 == r2.
Stencil4D asg_t2_stencil(int r1, int r2);

/// Raw weighted sum of a lightfield-frame stencil on a continuous field,
/// taps spaced by (h_xy, h_xy, h_uv, h_uv) around `at`.
double stencil_sum(const Stencil4D& s, const std::function<double(const RayTwoPlane&)>& field,
                   const RayTwoPlane& at, double h_xy, double h_uv);

/// Raw weighted sum of a xi-frame stencil on a continuous field, spacing h.
double stencil_sum_xi(const Stencil4D& s, const std::function<double(const XiPoint&)>& field,
                      const XiPoint& at, double h);

/// How fractional tap positions are read from a microimage.
enum class TapInterpolation { Bilinear, Cubic };

/// Stencil response with a per-sample validity mask.
struct FilteredLightfield {
  Lightfield values;
  std::vector<unsigned char> valid;  // same indexing as values
  int ring_u = 0;  // outer microimage rings invalidated along u
  int ring_v = 0;  // ... and along v

  bool is_valid(int ix, int iy, int iu, int iv) const {
    return valid[values.index(ix, iy, iu, iv)] != 0;
  }
};

/// out(x, y, u, v) = sum_taps w * lf(x + dx + F du, y + dy + F dv, u + du, v + dv)
/// interpolated in the spatial offset (bilinear unless asked otherwise). F is the disparity in
/// pixels per microimage step that the sampling compensates: a feature that
/// moves by F pixels per microimage is read at the same scene point by every
/// tap. Samples with any tap outside the microimage grid or outside the
/// microimage are invalid. Throws StencilTooLarge when the footprint exceeds
/// the lightfield.
FilteredLightfield apply_stencil(const Lightfield& lf, const Stencil4D& s, double focus_shift,
                                 TapInterpolation interp = TapInterpolation::Bilinear);

/// Same as apply_stencil but evaluates only microimages [u0, u1) x [v0, v1);
/// everything else is marked invalid.
FilteredLightfield apply_stencil_region(const Lightfield& lf, const Stencil4D& s,
                                        double focus_shift, int u0, int u1, int v0, int v1,
                                        TapInterpolation interp = TapInterpolation::Bilinear);

/// Plain-text tap list: '#' comment lines (scale, frame, provenance), then one
/// "dx dy du dv weight" line per tap.
void write_stencil(std::ostream& os, const Stencil4D& s);
Stencil4D read_stencil(std::istream& is);

/// Parses john|john9|asg1|asg2|asg3|asgN|asgT2:R1,R2. Throws InvalidArgument.
Stencil4D stencil_by_name(const std::string& name);

}  // namespace johnfield
