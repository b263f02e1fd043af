#include <doctest.h>

#include <string>

#include "johnfield/scene.hpp"

using namespace johnfield;
namespace fs = std::filesystem;

namespace {

const fs::path kData = JOHNFIELD_TEST_DATA;

std::string error_of(const std::string& text, ErrorKind* kind = nullptr) {
  try {
    parse_scene(text, kData, "t.toml");
  } catch (const Error& e) {
    if (kind) *kind = e.kind();
    return e.what();
  }
  return {};
}

const char* kHeader = R"(version = 1
kind = "layers"
seed = 4
[lightfield]
nu = 5
nv = 5
nx = 16
ny = 16
)";

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("fixture scenes load") {
  const auto planes = load_scene(kData / "two_planes.toml");
  CHECK(planes.kind == SceneKind::Layers);
  CHECK(planes.seed == 11);
  REQUIRE(planes.lightfield);
  CHECK(planes.lightfield->nu == 9);
  CHECK(planes.lightfield->nx == 64);
  REQUIRE(planes.layers.size() == 2);
  CHECK(planes.layers[0].disparity_c == 1.0);
  CHECK(planes.layers[1].disparity_c == 2.0);
  CHECK(planes.layers[0].texture.image.width == 112);
  CHECK_FALSE(planes.layers[0].texture.alpha);
  REQUIRE(planes.layers[1].texture.alpha);
  const Image2D& a = *planes.layers[1].texture.alpha;
  CHECK(a(0, 50) == 0.0);
  CHECK(a(111, 50) == 1.0);

  const auto blobs = load_scene(kData / "blobs.toml");
  CHECK(blobs.kind == SceneKind::Blobs);
  REQUIRE(blobs.volume);
  CHECK(blobs.volume->nz == 13);
  CHECK(blobs.volume->origin.x == doctest::Approx(-15.5));
  CHECK(blobs.volume->origin.z == doctest::Approx(-6.0));
  REQUIRE(blobs.blobs.size() == 2);
  CHECK(blobs.blobs[1].amplitude == 0.8);
}

TEST_CASE("same seed gives the same textures") {
  const auto a = load_scene(kData / "two_planes.toml");
  const auto b = load_scene(kData / "two_planes.toml");
  CHECK(a.layers[0].texture.image.data == b.layers[0].texture.image.data);
  CHECK(a.layers[0].texture.image.data != a.layers[1].texture.image.data);
}

TEST_CASE("constant textures, rect masks and defaults") {
  const auto s = parse_scene(std::string(kHeader) + R"(
[[layer]]
disparity = 0.5
opacity = 0.25
texture = { kind = "constant", width = 10, height = 8, value = 0.3, spacing = 2.0 }
mask = { kind = "rect", min = [-3.0, -100.0], max = [3.0, 100.0] }
)", kData);
  REQUIRE(s.layers.size() == 1);
  const auto& l = s.layers[0];
  CHECK(l.opacity == 0.25);
  CHECK(l.texture.spacing == 2.0);
  CHECK(l.texture.image(4, 4) == 0.3);
  CHECK(s.lightfield->pitch_uv == 1.0);
  // Texel x world = (tx - 4.5) * 2.
  const Image2D& a = *l.texture.alpha;
  CHECK(a(3, 0) == 1.0);   // -3
  CHECK(a(6, 0) == 1.0);   // 3
  CHECK(a(2, 0) == 0.0);   // -5
  CHECK(a(7, 0) == 0.0);   // 5
}

TEST_CASE("texture from an image file") {
  const auto s = parse_scene(std::string(kHeader) + R"(
[[layer]]
disparity = 1.0
texture = { path = "rgb_3x2.png", spacing = 0.5 }
)", kData);
  CHECK(s.layers[0].texture.image.width == 3);
  CHECK(s.layers[0].texture.spacing == 0.5);
}

TEST_CASE("missing texture file names the field and line") {
  const std::string msg = error_of(std::string(kHeader) + R"(
[[layer]]
disparity = 1.0
texture = { path = "no_such_texture.png" }
)");
  CHECK(msg.find("layer[0].texture.path") != std::string::npos);
  CHECK(msg.find("file not found") != std::string::npos);
  CHECK(msg.find("t.toml:12") != std::string::npos);
}

TEST_CASE("field errors carry line numbers") {
  ErrorKind kind{};
  std::string msg = error_of(std::string(kHeader) + "\n[[layer]]\ndisparity = \"far\"\n"
                             "texture = { kind = \"constant\", width = 2, height = 2, value = 1.0 }\n",
                             &kind);
  CHECK(kind == ErrorKind::Format);
  CHECK(msg.find("t.toml:11: layer[0].disparity") != std::string::npos);

  msg = error_of("version = 2\nkind = \"layers\"\n");
  CHECK(msg.find("version") != std::string::npos);
  msg = error_of("version = 1\nkind = \"rays\"\n");
  CHECK(msg.find("kind") != std::string::npos);
  msg = error_of("version = 1\nkind = = 3\n", &kind);
  CHECK(kind == ErrorKind::Format);
  CHECK(msg.find("t.toml:2") != std::string::npos);
  msg = error_of(std::string(kHeader) + "\n[[layer]]\ndisparity = 1.0\n"
                 "texture = { kind = \"noise\", width = 8, height = 8 }\nopacity = 2.0\n");
  CHECK(msg.find("layer[0].opacity") != std::string::npos);
  msg = error_of(std::string(kHeader) + "\n[[layer]]\ndisparity = 1.0\n"
                 "texture = { kind = \"noise\", width = 8, height = 8 }\n"
                 "mask = { kind = \"circle\" }\n");
  CHECK(msg.find("layer[0].mask.kind") != std::string::npos);
  msg = error_of("version = 1\nkind = \"layers\"\n[lightfield]\nnu = 0\nnv = 1\nnx = 1\nny = 1\n");
  CHECK(msg.find("lightfield.nu") != std::string::npos);
}

TEST_CASE("scenes without content are empty") {
  ErrorKind kind{};
  error_of(kHeader, &kind);
  CHECK(kind == ErrorKind::EmptyScene);
  error_of("version = 1\nkind = \"blobs\"\n[volume]\nnx = 4\nny = 4\nnz = 4\n", &kind);
  CHECK(kind == ErrorKind::EmptyScene);
}

TEST_CASE("missing scene file is an IO error") {
  try {
    load_scene(kData / "absent.toml");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

}
