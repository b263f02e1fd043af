#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "johnfield/image.hpp"
#include "johnfield/io.hpp"

using namespace johnfield;
namespace fs = std::filesystem;

namespace {

const fs::path kData = JOHNFIELD_TEST_DATA;

double srgb(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}
double lum8(int r, int g, int b) {
  return 0.2126 * srgb(r / 255.0) + 0.7152 * srgb(g / 255.0) + 0.0722 * srgb(b / 255.0);
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("lightfield round trip keeps float32 values") {
  testing::TempDir dir("io");
  const LightfieldShape s{3, 2, 5, 4, 0.25, 0.5};
  std::vector<double> data(s.samples());
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  for (double& v : data) v = static_cast<float>(d(rng));
  io::write_lightfield(dir / "a.lfr", Lightfield(s, data));
  CHECK(fs::exists(dir / "a.lfr.f32"));
  CHECK(fs::file_size(dir / "a.lfr.f32") == s.samples() * 4);
  const auto back = io::read_lightfield(dir / "a.lfr");
  CHECK(back.shape() == s);
  CHECK(std::equal(data.begin(), data.end(), back.data().begin()));
  const auto m = io::read_manifest(dir / "a.lfr");
  CHECK(m.at("format") == "johnfield-lightfield");
  CHECK(m.at("index_order") == "v,u,y,x");
  CHECK(m.at("byte_order") == "little");
  CHECK(m.at("nu") == "3");
}

TEST_CASE("payload is little-endian float32 in v, u, y, x order") {
  testing::TempDir dir("io");
  const LightfieldShape s{2, 1, 2, 1, 1, 1};
  io::write_lightfield(dir / "b.lfr", Lightfield(s, {1.0, 2.0, -0.5, 3.25}));
  const std::string bytes = slurp(dir / "b.lfr.f32");
  REQUIRE(bytes.size() == 16);
  // 1.0f = 0x3f800000, little-endian.
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3f);
  CHECK(static_cast<unsigned char>(bytes[2]) == 0x80);
  // -0.5f = 0xbf000000 at the third sample (u = 1, x = 0).
  CHECK(static_cast<unsigned char>(bytes[11]) == 0xbf);
}

TEST_CASE("volume round trip") {
  testing::TempDir dir("io");
  VolumeGrid vol(4, 3, 2, 0.5, {-1, -0.5, 2});
  for (std::size_t i = 0; i < vol.size(); ++i) vol.data()[i] = 0.25 * i;
  io::write_volume(dir / "v.vol", vol);
  const auto back = io::read_volume(dir / "v.vol");
  CHECK(back.nx() == 4);
  CHECK(back.nz() == 2);
  CHECK(back.spacing() == 0.5);
  CHECK(back.origin().z == 2.0);
  CHECK(std::equal(vol.data().begin(), vol.data().end(), back.data().begin()));
  CHECK(io::read_manifest(dir / "v.vol").at("index_order") == "z,y,x");
}

TEST_CASE("manifest errors name the problem") {
  testing::TempDir dir("io");
  write_text(dir / "bad.lfr", "format: johnfield-lightfield\nthis line is wrong\n");
  try {
    io::read_manifest(dir / "bad.lfr");
    FAIL("expected Format");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  write_text(dir / "vol.lfr", "format: johnfield-volume\n");
  CHECK(kind_of([&] { io::read_lightfield(dir / "vol.lfr"); }) == ErrorKind::Format);
  CHECK(kind_of([&] { io::read_lightfield(dir / "missing.lfr"); }) == ErrorKind::Io);

  const LightfieldShape s{2, 2, 2, 2, 1, 1};
  io::write_lightfield(dir / "short.lfr", Lightfield(s));
  fs::resize_file(dir / "short.lfr.f32", 12);
  CHECK(kind_of([&] { io::read_lightfield(dir / "short.lfr"); }) == ErrorKind::Format);

  write_text(dir / "c.lfr",
             "# comment\nformat: johnfield-lightfield\nversion: 1\ndtype: float32\n"
             "byte_order: little\nindex_order: v,u,y,x\nnu: two\n");
  try {
    io::read_lightfield(dir / "c.lfr");
    FAIL("expected Format");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("nu") != std::string::npos);
  }
}

TEST_CASE("f32 sidecars") {
  testing::TempDir dir("io");
  const std::vector<double> v{0.1, -2.0, 1e6};
  io::write_f32(dir / "x.f32", v);
  const auto back = io::read_f32(dir / "x.f32", 3);
  for (int i = 0; i < 3; ++i) CHECK(back[i] == static_cast<float>(v[i]));
  CHECK_THROWS_AS(io::read_f32(dir / "x.f32", 4), Error);
}

TEST_CASE("colour PNG decodes to linear Rec.709 luminance") {
  const auto img = io::read_png(kData / "rgb_3x2.png");
  REQUIRE(img.width == 3);
  REQUIRE(img.height == 2);
  CHECK(img(0, 0) == doctest::Approx(0.2126));
  CHECK(img(1, 0) == doctest::Approx(0.7152));
  CHECK(img(2, 0) == doctest::Approx(0.0722));
  CHECK(img(0, 1) == doctest::Approx(lum8(128, 128, 128)));
  CHECK(img(1, 1) == doctest::Approx(1.0));
  CHECK(img(2, 1) == doctest::Approx(0.0));
  const auto pal = io::read_png(kData / "palette_3x2.png");
  for (std::size_t i = 0; i < img.data.size(); ++i) CHECK(pal.data[i] == doctest::Approx(img.data[i]));
}

TEST_CASE("alpha is dropped and 16-bit gray is linear") {
  const auto rgba = io::read_png(kData / "rgba_2x1.png");
  CHECK(rgba(0, 0) == doctest::Approx(1.0));
  CHECK(rgba(1, 0) == doctest::Approx(lum8(64, 128, 192)));
  const auto g = io::read_png(kData / "gray16_2x2.png");
  CHECK(g(0, 0) == 0.0);
  CHECK(g(1, 0) == doctest::Approx(1.0));
  CHECK(g(0, 1) == doctest::Approx(32768.0 / 65535.0));
  CHECK(g(1, 1) == doctest::Approx(1000.0 / 65535.0));
}

TEST_CASE("PNG writers round trip") {
  testing::TempDir dir("io");
  Image2D img(5, 3);
  for (int i = 0; i < 15; ++i) img.data[i] = i / 14.0;
  io::write_png16(dir / "a.png", img);
  const auto a = io::read_png(dir / "a.png");
  for (int i = 0; i < 15; ++i) CHECK(std::abs(a.data[i] - img.data[i]) <= 0.5 / 65535 + 1e-12);
  io::write_png_srgb(dir / "b.png", img);
  const auto b = io::read_png(dir / "b.png");
  for (int i = 0; i < 15; ++i) {
    const int code = static_cast<int>(std::lround(linear_to_srgb(img.data[i]) * 255));
    CHECK(b.data[i] == doctest::Approx(srgb(code / 255.0)));
  }
}

TEST_CASE("broken PNG files are reported") {
  testing::TempDir dir("io");
  write_text(dir / "x.png", "definitely not a png");
  CHECK(kind_of([&] { io::read_png(dir / "x.png"); }) == ErrorKind::Format);
  CHECK(kind_of([&] { io::read_png(dir / "nope.png"); }) == ErrorKind::Io);
}

TEST_CASE("sRGB transfer curve") {
  for (double c : {0.0, 0.02, 0.04045, 0.3, 0.8, 1.0}) {
    CHECK(srgb_to_linear(c) == doctest::Approx(srgb(c)));
    CHECK(linear_to_srgb(srgb_to_linear(c)) == doctest::Approx(c));
  }
}

}
