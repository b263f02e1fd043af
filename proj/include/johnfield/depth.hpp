#pragma once

// Shift-and-blend rendering, kernel-filtered focus stacks, and per-pixel
// depth and depth uncertainty read from the brightness-versus-focus profile.

#include <span>
#include <vector>

#include "johnfield/kernels.hpp"
#include "johnfield/lfcore.hpp"

namespace johnfield {

/// Blended brightness images over a uniform grid of focus shifts. Frames are
/// stored as float (n x height x width) to keep large stacks affordable.
struct FocusStack {
  int n_steps = 0;
  double f_min = 0.0, f_max = 1.0;
  int width = 0, height = 0;
  std::vector<float> frames;
  std::vector<unsigned char> valid;

  double focus(int i) const { return f_min + (f_max - f_min) * i / (n_steps - 1); }
  std::size_t frame_size() const { return static_cast<std::size_t>(width) * height; }
  float at(int i, int x, int y) const {
    return frames[i * frame_size() + static_cast<std::size_t>(y) * width + x];
  }
  bool valid_at(int i, int x, int y) const {
    return valid[i * frame_size() + static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::span<const float> frame(int i) const {
    return std::span<const float>(frames).subspan(i * frame_size(), frame_size());
  }
  void validate() const;
};

/// Synthetic-aperture render: mean over the central B x B microimages of
/// lf(x + F (u - u_c), y + F (v - v_c), u, v), bilinear, averaged over the
/// in-bounds samples only.
Image2D blend_render(const Lightfield& lf, double focus_shift, int aperture);

struct BlendResult {
  Image2D image;
  std::vector<unsigned char> valid;  // every contributing sample was valid
};

/// Blend of a filtered lightfield, restricted to its valid samples.
BlendResult blend_render(const FilteredLightfield& lf, double focus_shift, int aperture);

struct FocusStackOptions {
  double f_min = 6.0;
  double f_max = 13.0;
  int steps = 256;
  int aperture = 0;  // B; 0 picks the largest aperture the stencil leaves valid
  int out_width = 720;
  int out_height = 540;
  // Bilinear taps leave a resampling floor that hides the shift dependence
  // of the response away from integer and half-integer disparities.
  TapInterpolation interpolation = TapInterpolation::Cubic;
};

/// For each F on the uniform grid: |apply_stencil(lf, s, F)|, blended at F
/// over the central aperture, resampled to the output size.
FocusStack kernel_focus_stack(const Lightfield& lf, const Stencil4D& stencil,
                              const FocusStackOptions& options);

/// Largest aperture whose microimages all survive the stencil's invalid rings.
int max_valid_aperture(const Lightfield& lf, const Stencil4D& stencil);

struct PixelMap {
  int width = 0, height = 0;
  std::vector<double> values;         // normalized to [0, 1]
  std::vector<unsigned char> valid;   // valid in every frame
  std::vector<unsigned char> flat;    // L_max == L_min

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  bool valid_at(int x, int y) const { return valid[static_cast<std::size_t>(y) * width + x] != 0; }
};
using DepthMap = PixelMap;
using UncertaintyMap = PixelMap;

/// Index of the first global minimum (ties go to the smaller focus).
std::size_t profile_argmin(std::span<const double> profile);

struct TroughWidth {
  double width = 1.0;
  bool flat = false;
};

/// Total normalized length where the piecewise-linear profile lies at or
/// below L_min + fraction (L_max - L_min). Disjoint runs add up; a run that
/// never recrosses extends to the end of the range; the sum is clipped to 1.
/// A flat profile yields width 1 and the flat flag.
TroughWidth trough_width(std::span<const double> profile, double fraction = 0.05);

/// Per pixel, argmin / (n - 1). Flat profiles give 0 and the flat flag.
DepthMap depth_from_stack(const FocusStack& stack);

UncertaintyMap uncertainty_from_stack(const FocusStack& stack, double fraction = 0.05);

}  // namespace johnfield
