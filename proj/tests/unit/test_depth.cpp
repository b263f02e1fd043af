#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "johnfield/depth.hpp"
#include "johnfield/image.hpp"
#include "johnfield/synth.hpp"

using namespace johnfield;

namespace {

SceneLayer plane(double c, std::uint64_t seed, int size = 120) {
  SceneLayer layer;
  layer.disparity_c = c;
  layer.texture.image = noise_texture(size, size, 1.5, seed);
  return layer;
}

FocusStack stack_from_profiles(const std::vector<std::vector<double>>& profiles) {
  FocusStack s;
  s.n_steps = static_cast<int>(profiles.front().size());
  s.f_min = 0;
  s.f_max = 1;
  s.width = static_cast<int>(profiles.size());
  s.height = 1;
  s.frames.resize(s.frame_size() * s.n_steps);
  s.valid.assign(s.frames.size(), 1);
  for (int x = 0; x < s.width; ++x)
    for (int i = 0; i < s.n_steps; ++i) s.frames[i * s.frame_size() + x] = static_cast<float>(profiles[x][i]);
  return s;
}

std::vector<double> v_profile(int n, double vertex, double left_slope, double right_slope) {
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    p[i] = t < vertex ? left_slope * (vertex - t) : right_slope * (t - vertex);
  }
  return p;
}

}  // namespace

TEST_SUITE("depth") {

TEST_CASE("blend at the plane disparity reproduces the texture") {
  const LightfieldShape s{7, 7, 40, 36, 1.0, 1.0};
  const auto layer = plane(2.0, 1);
  const auto lf = layered_scene_lightfield(std::span(&layer, 1), s);
  const auto img = blend_render(lf, 2.0, 7);
  for (int y = 8; y < 28; ++y)
    for (int x = 8; x < 32; ++x) {
      double color, coverage;
      layer.texture.sample(s.x_at(x), s.y_at(y), color, coverage);
      CHECK(std::abs(img(x, y) - color) <= 1e-6);
    }
}

TEST_CASE("blend away from the disparity mixes different samples") {
  const LightfieldShape s{5, 5, 40, 36, 1.0, 1.0};
  const auto layer = plane(1.0, 2);
  const auto lf = layered_scene_lightfield(std::span(&layer, 1), s);
  const double F = 3.0;
  const auto img = blend_render(lf, F, 5);
  double variance_sum = 0;
  for (int y = 14; y < 22; ++y)
    for (int x = 14; x < 26; ++x) {
      std::vector<double> samples;
      for (int iv = 0; iv < 5; ++iv)
        for (int iu = 0; iu < 5; ++iu)
          samples.push_back(lf(x + static_cast<int>(F) * (iu - 2), y + static_cast<int>(F) * (iv - 2), iu, iv));
      double mean = 0, var = 0;
      for (double v : samples) mean += v;
      mean /= samples.size();
      for (double v : samples) var += (v - mean) * (v - mean);
      variance_sum += var;
      CHECK(img(x, y) == doctest::Approx(mean).epsilon(1e-12));
    }
  CHECK(variance_sum > 0);
}

TEST_CASE("unit aperture returns the central microimage") {
  const LightfieldShape s{5, 5, 20, 18, 1.0, 1.0};
  const auto layer = plane(1.3, 3);
  const auto lf = layered_scene_lightfield(std::span(&layer, 1), s);
  for (double F : {0.0, 2.7, 6.0}) {
    const auto img = blend_render(lf, F, 1);
    const auto center = lf.microimage(2, 2);
    for (std::size_t i = 0; i < center.size(); ++i) CHECK(img.data[i] == center[i]);
  }
  CHECK_THROWS_AS(blend_render(lf, 0.0, 6), Error);
}

TEST_CASE("filtered blend skips invalid samples") {
  const LightfieldShape s{5, 5, 20, 18, 1.0, 1.0};
  const auto layer = plane(1.0, 4);
  const auto lf = layered_scene_lightfield(std::span(&layer, 1), s);
  const auto filtered = apply_stencil(lf, asg_t1_stencil(1), 1.0);
  const auto r = blend_render(filtered, 1.0, 3);
  CHECK_FALSE(r.valid[0]);
  CHECK(r.valid[9 * 20 + 10]);
  CHECK(std::abs(r.image(10, 9)) < 1e-9);
}

TEST_CASE("focus stack of a constant lightfield is dark") {
  const LightfieldShape s{7, 7, 24, 24, 1.0, 1.0};
  Lightfield lf(s, std::vector<double>(s.samples(), 0.6));
  FocusStackOptions opt;
  opt.f_min = 0.5;
  opt.f_max = 2.0;
  opt.steps = 4;
  opt.out_width = 24;
  opt.out_height = 24;
  const auto stack = kernel_focus_stack(lf, asg_t1_stencil(1), opt);
  CHECK(stack.frames.size() == 4u * 24 * 24);
  for (float v : stack.frames) CHECK(std::abs(v) < 1e-9);
  const auto depth = depth_from_stack(stack);
  std::size_t flat = 0;
  for (std::size_t p = 0; p < depth.values.size(); ++p)
    if (depth.valid[p]) flat += depth.flat[p];
  CHECK(flat > 0);
}

TEST_CASE("focus stack dips at the planted disparity of each region") {
  const LightfieldShape s{7, 7, 48, 48, 1.0, 1.0};
  std::vector<SceneLayer> layers{plane(1.0, 5), plane(1.5, 6)};
  Image2D alpha(120, 120);
  for (int y = 0; y < 120; ++y)
    for (int x = 0; x < 120; ++x) alpha(x, y) = x - 59.5 > 0 ? 1.0 : 0.0;
  layers[1].texture.alpha = alpha;
  const auto lf = layered_scene_lightfield(layers, s);
  FocusStackOptions opt;
  opt.f_min = 0.6;
  opt.f_max = 1.9;
  opt.steps = 27;  // step 0.05
  opt.aperture = 3;
  opt.out_width = 48;
  opt.out_height = 48;
  for (const char* name : {"asg1", "asg2"}) {
    const auto stack = kernel_focus_stack(lf, stencil_by_name(name), opt);
    const auto depth = depth_from_stack(stack);
    int good[2] = {0, 0}, total[2] = {0, 0};
    for (int y = 6; y < 42; ++y)
      for (int x = 6; x < 42; ++x) {
        const double wx = s.x_at(x);
        if (std::abs(wx) <= 8 || !depth.valid_at(x, y)) continue;
        const int region = wx > 0 ? 1 : 0;
        const double c = region ? 1.5 : 1.0;
        const double truth = (c - opt.f_min) / (opt.f_max - opt.f_min) * (opt.steps - 1);
        ++total[region];
        if (std::abs(depth.at(x, y) * (opt.steps - 1) - truth) <= 1.0 + 1e-9) ++good[region];
      }
    for (int r = 0; r < 2; ++r) {
      REQUIRE(total[r] > 50);
      CHECK(static_cast<double>(good[r]) / total[r] >= 0.9);
    }
  }
}

TEST_CASE("argmin ties go to the smaller focus") {
  const std::vector<double> p{3, 1, 2, 1, 5};
  CHECK(profile_argmin(p) == 1);
  const auto stack = stack_from_profiles({{1, 2, 3, 4, 5}, {2, 2, 2, 2, 2}, {5, 4, 3, 0, 1}});
  const auto depth = depth_from_stack(stack);
  CHECK(depth.values[0] == 0.0);
  CHECK_FALSE(depth.flat[0]);
  CHECK(depth.values[1] == 0.0);
  CHECK(depth.flat[1]);
  CHECK(depth.values[2] == doctest::Approx(0.75));
}

TEST_CASE("depth and uncertainty ignore positive affine rescaling") {
  std::vector<std::vector<double>> profiles;
  for (int k = 0; k < 6; ++k) profiles.push_back(v_profile(33, 0.1 + 0.15 * k, 1.0 + k, 2.0));
  std::vector<std::vector<double>> scaled = profiles;
  for (auto& p : scaled)
    for (double& v : p) v = 3.0 * v + 0.25;
  const auto a = stack_from_profiles(profiles), b = stack_from_profiles(scaled);
  const auto da = depth_from_stack(a), db = depth_from_stack(b);
  const auto ua = uncertainty_from_stack(a), ub = uncertainty_from_stack(b);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    CHECK(da.values[i] == db.values[i]);
    CHECK(ua.values[i] == doctest::Approx(ub.values[i]).epsilon(1e-5));
  }
}

TEST_CASE("trough width of V profiles") {
  // |t - 0.5| has T = 0.025, crossings at 0.5 +- 0.025.
  CHECK(trough_width(v_profile(1001, 0.5, 1, 1), 0.05).width == doctest::Approx(0.05).epsilon(1e-9));
  // Slopes 1 and 3: L_max = 1.5, T = 0.075, crossings at 0.425 and 0.525.
  const auto w = trough_width(v_profile(1001, 0.5, 1, 3), 0.05);
  CHECK_FALSE(w.flat);
  CHECK(w.width == doctest::Approx(0.1).epsilon(1e-9));
  // Crossings between grid points are interpolated linearly.
  CHECK(trough_width(v_profile(11, 0.5, 1, 3), 0.05).width == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("flat profile has full width and a flag") {
  const auto w = trough_width(std::vector<double>(17, 0.4), 0.05);
  CHECK(w.flat);
  CHECK(w.width == 1.0);
  const auto u = uncertainty_from_stack(stack_from_profiles({std::vector<double>(9, 2.0)}));
  CHECK(u.values[0] == 1.0);
  CHECK(u.flat[0]);
}

TEST_CASE("disjoint sub-threshold runs add up") {
  const int n = 201;
  std::vector<double> p(n, 1.0);
  for (int i = 40; i <= 60; ++i) p[i] = 0.0;   // [0.2, 0.3]
  for (int i = 120; i <= 150; ++i) p[i] = 0.0; // [0.6, 0.75]
  // Edge samples sit exactly on the threshold so the runs end there.
  p[40] = p[60] = p[120] = p[150] = 0.05;
  CHECK(trough_width(p, 0.05).width == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("one-sided troughs extend to the range end and clip at one") {
  std::vector<double> rising(21);
  for (int i = 0; i < 21; ++i) rising[i] = i;
  // T = 1 is crossed one step in.
  CHECK(trough_width(rising, 0.05).width == doctest::Approx(0.05));
  std::vector<double> low(21, 0.0);
  low[10] = 100.0;
  // T = 50 is crossed half a step either side of the spike.
  CHECK(trough_width(low, 0.5).width == doctest::Approx(0.95));
  CHECK_THROWS_AS(trough_width(std::vector<double>{1.0}), Error);
}

TEST_CASE("stack option validation") {
  const LightfieldShape s{5, 5, 16, 16, 1.0, 1.0};
  Lightfield lf(s);
  FocusStackOptions opt;
  opt.out_width = opt.out_height = 16;
  opt.steps = 1;
  CHECK_THROWS_AS(kernel_focus_stack(lf, asg_t1_stencil(1), opt), Error);
  opt.steps = 3;
  opt.f_min = 2;
  opt.f_max = 1;
  CHECK_THROWS_AS(kernel_focus_stack(lf, asg_t1_stencil(1), opt), Error);
  CHECK(max_valid_aperture(lf, asg_t1_stencil(1)) == 3);
  CHECK(max_valid_aperture(lf, asg_t1_stencil(2)) == 1);
  opt.f_min = 0;
  opt.f_max = 1;
  try {
    kernel_focus_stack(lf, asg_t1_stencil(3), opt);
    FAIL("expected StencilTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StencilTooLarge);
  }
}

TEST_CASE("resampled stack has the requested size") {
  const LightfieldShape s{5, 5, 32, 24, 1.0, 1.0};
  const auto layer = plane(1.0, 7);
  const auto lf = layered_scene_lightfield(std::span(&layer, 1), s);
  FocusStackOptions opt;
  opt.f_min = 0.5;
  opt.f_max = 1.5;
  opt.steps = 3;
  opt.out_width = 16;
  opt.out_height = 12;
  const auto stack = kernel_focus_stack(lf, asg_t1_stencil(1), opt);
  CHECK(stack.width == 16);
  CHECK(stack.height == 12);
  CHECK(stack.focus(1) == doctest::Approx(1.0));
  CHECK_NOTHROW(stack.validate());
}

}
