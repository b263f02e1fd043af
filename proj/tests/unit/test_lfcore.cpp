#include <doctest.h>

#include <cmath>
#include <random>

#include "johnfield/lfcore.hpp"

using namespace johnfield;

namespace {

void check_xi(const XiPoint& got, const XiPoint& want) {
  CHECK(got.xi1 == doctest::Approx(want.xi1));
  CHECK(got.xi2 == doctest::Approx(want.xi2));
  CHECK(got.xi3 == doctest::Approx(want.xi3));
  CHECK(got.xi4 == doctest::Approx(want.xi4));
}

void check_ray(const RayTwoPlane& got, const RayTwoPlane& want, double eps = 1e-12) {
  CHECK(std::abs(got.x - want.x) <= eps);
  CHECK(std::abs(got.y - want.y) <= eps);
  CHECK(std::abs(got.u - want.u) <= eps);
  CHECK(std::abs(got.v - want.v) <= eps);
}

}  // namespace

TEST_SUITE("lfcore") {

TEST_CASE("xi coordinates of simple rays") {
  check_xi(xi_from_xyuv({0, 0, 0, 0}), {0, 0, 0, 0});
  check_xi(xi_from_xyuv({1, 0, 0, 0}), {0, 0, 0.5, -0.5});
  check_xi(xi_from_xyuv({0, 2, 2, 0}), {2, 0, 0, 0});
}

TEST_CASE("rays from xi coordinates") {
  check_ray(xyuv_from_xi({0, 0, 0, 0}), {0, 0, 0, 0});
  check_ray(xyuv_from_xi({1, 0, 0, 0}), {0, 1, 1, 0});
}

TEST_CASE("xi round trip on random rays") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const RayTwoPlane q{d(rng), d(rng), d(rng), d(rng)};
    const RayTwoPlane back = xyuv_from_xi(xi_from_xyuv(q));
    const double tol = 1e-15 * 2e3;
    check_ray(back, q, tol);
  }
}

TEST_CASE("composed coordinate maps are the identity on the basis") {
  for (int k = 0; k < 4; ++k) {
    XiPoint e{};
    (&e.xi1)[k] = 1.0;
    const XiPoint back = xi_from_xyuv(xyuv_from_xi(e));
    check_xi(back, e);
  }
}

TEST_CASE("two-plane form of point-direction lines") {
  check_ray(two_plane_from_point_direction(RayPointDirection({0, 0, 0}, {0, 0, 1})), {0, 0, 0, 0});
  check_ray(two_plane_from_point_direction(RayPointDirection({1, 2, 0}, {0, 0, 1})), {1, 2, 0, 0});
  const double s = 1.0 / std::sqrt(2.0);
  check_ray(two_plane_from_point_direction(RayPointDirection({0, 0, 1}, {s, 0, s})),
            {-1, 0, 1, 0});
}

TEST_CASE("two-plane form ignores direction sign") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{d(rng), d(rng), d(rng)};
    Vec3 w{d(rng), d(rng), d(rng)};
    if (std::abs(w.z) < 0.1) w.z = 0.5;
    const auto a = RayPointDirection::from_unnormalized(p, w);
    const auto b = RayPointDirection::from_unnormalized(p, {-w.x, -w.y, -w.z});
    CHECK(a == b);
    check_ray(two_plane_from_point_direction(a), two_plane_from_point_direction(b), 1e-9);
  }
}

TEST_CASE("line parallel to the reference plane is rejected") {
  try {
    two_plane_from_point_direction(RayPointDirection({0, 0, 0}, {1, 0, 0}));
    FAIL("expected DegenerateDirection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateDirection);
  }
}

TEST_CASE("direction must be unit length") {
  CHECK_THROWS_AS(RayPointDirection({0, 0, 0}, {0, 0, 2}), Error);
  CHECK_THROWS_AS(RayPointDirection::from_unnormalized({0, 0, 0}, {0, 0, 0}), Error);
}

TEST_CASE("volume grid geometry and trilinear sampling") {
  VolumeGrid vol(4, 3, 2, 0.5, {1, 2, 3});
  CHECK(vol.size() == 24);
  const Vec3 p = vol.world(1, 2, 1);
  CHECK(p.x == 1.5);
  CHECK(p.y == 3.0);
  CHECK(p.z == 3.5);
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 3; ++y)
      for (int x = 0; x < 4; ++x) vol(x, y, z) = x + 10 * y + 100 * z;
  // Trilinear is exact on affine data.
  CHECK(vol.sample(1.25, 2.75, 3.25) == doctest::Approx(0.5 + 10 * 1.5 + 100 * 0.5));
  CHECK(vol.sample(-5, 0, 0) == 0.0);
  CHECK_THROWS_AS(VolumeGrid(2, 2, 2, 1.0, {}, std::vector<double>(7)), Error);
  CHECK_THROWS_AS(VolumeGrid(2, 2, 2, 0.0), Error);
}

TEST_CASE("lightfield indexing is v, u, y, x with x fastest") {
  LightfieldShape s{3, 2, 4, 5};
  Lightfield lf(s);
  CHECK(lf.size() == s.samples());
  CHECK(lf.index(1, 0, 0, 0) == 1);
  CHECK(lf.index(0, 1, 0, 0) == 4);
  CHECK(lf.index(0, 0, 1, 0) == 20);
  CHECK(lf.index(0, 0, 0, 1) == 60);
  lf(2, 3, 1, 1) = 7.0;
  CHECK(lf.microimage(1, 1)[3 * 4 + 2] == 7.0);
  CHECK(s.u_at(1) == 0.0);
  CHECK(s.v_at(0) == -0.5);
  CHECK(s.x_at(0) == -1.5);
  CHECK_THROWS_AS(Lightfield(s, std::vector<double>(3)), Error);
  LightfieldShape bad = s;
  bad.pitch_uv = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("bilinear and cubic interpolation") {
  std::vector<double> plane(6 * 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) plane[y * 6 + x] = 2.0 * x - 3.0 * y + 1.0;
  double v = 0;
  REQUIRE(bilinear(plane, 6, 5, 2.25, 1.5, v));
  CHECK(v == doctest::Approx(2 * 2.25 - 3 * 1.5 + 1));
  CHECK_FALSE(bilinear(plane, 6, 5, 5.5, 1.0, v));
  REQUIRE(bilinear(plane, 6, 5, 5.0, 4.0, v));
  CHECK(v == doctest::Approx(10 - 12 + 1));

  // Catmull-Rom reproduces quadratics along each axis.
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) plane[y * 6 + x] = 0.3 * x * x - x + 0.5 * y * y;
  REQUIRE(cubic(plane, 6, 5, 2.3, 2.6, v));
  CHECK(v == doctest::Approx(0.3 * 2.3 * 2.3 - 2.3 + 0.5 * 2.6 * 2.6));
  REQUIRE(cubic(plane, 6, 5, 5.0, 2.0, v));  // integer coords need no footprint
  CHECK(v == doctest::Approx(plane[2 * 6 + 5]));
  CHECK_FALSE(cubic(plane, 6, 5, 0.5, 2.0, v));
}

}
