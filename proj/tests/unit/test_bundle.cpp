#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>

#include "helpers.hpp"
#include "johnfield/bundle.hpp"
#include "johnfield/image.hpp"
#include "johnfield/io.hpp"

using namespace johnfield;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

FocalStackImages smooth_stack(int n, int w, int h) {
  FocalStackImages st;
  st.layer_spacing = 2.0;
  st.spacing_xy = 1.0;
  for (int i = 0; i < n; ++i) st.layers.push_back(noise_texture(w, h, 2.0, 100 + i));
  return st;
}

FocusStack tiny_stack() {
  FocusStack s;
  s.n_steps = 3;
  s.f_min = 0.5;
  s.f_max = 1.5;
  s.width = 4;
  s.height = 3;
  s.frames.resize(36);
  for (int i = 0; i < 36; ++i) s.frames[i] = 0.1f * (i % 7);
  s.valid.assign(36, 1);
  return s;
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

// Bilinear read with zero outside, as a viewer would do it.
double sample(std::span<const double> img, int w, int h, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  auto at = [&](int px, int py) {
    return px < 0 || py < 0 || px >= w || py >= h ? 0.0 : img[static_cast<std::size_t>(py) * w + px];
  };
  return (1 - fy) * ((1 - fx) * at(x0, y0) + fx * at(x0 + 1, y0)) +
         fy * ((1 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1));
}

std::string message_of(const fs::path& dir) {
  try {
    load_bundle_manifest(dir);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("bundle") {

TEST_CASE("manifest round trips through the loader") {
  testing::TempDir dir("bundle");
  BundleContents c;
  c.layers = smooth_stack(4, 24, 20);
  c.stack = tiny_stack();
  PixelMap d;
  d.width = 4;
  d.height = 3;
  d.values.assign(12, 0.5);
  d.valid.assign(12, 1);
  d.flat.assign(12, 0);
  c.depth = d;
  c.uncertainty = d;
  c.lightfield = Lightfield({2, 2, 4, 3, 1, 1}, std::vector<double>(48, 0.25));
  export_bundle(dir.path(), c);
  const auto s = load_bundle_manifest(dir.path());
  CHECK(s.version == kBundleVersion);
  CHECK(s.layer_count == 4);
  CHECK(s.golden_count == 3);
  CHECK(s.stack_frames == 3);
  CHECK(s.has_depth);
  CHECK(s.has_uncertainty);
  CHECK(s.has_lightfield);
  const json m = read_json(dir / "manifest.json");
  CHECK(m["schema"] == kBundleSchema);
  CHECK(m["layers"][0]["z"].get<double>() == doctest::Approx(-3.0));
  CHECK(m["stack"]["frames"][1]["focus"].get<double>() == doctest::Approx(1.0));
  const auto raw = io::read_f32(dir / m["stack"]["frames"][2]["raw"].get<std::string>(), 12);
  for (int i = 0; i < 12; ++i) CHECK(raw[i] == c.stack->frames[24 + i]);
}

TEST_CASE("golden frames match an independent compositor within one code") {
  testing::TempDir dir("bundle");
  BundleContents c;
  c.layers = smooth_stack(5, 40, 32);
  c.max_slope = 1.0;
  export_bundle(dir.path(), c);
  const json m = read_json(dir / "manifest.json");
  const int w = m["view"]["width"], h = m["view"]["height"];
  const double spacing_xy = m["view"]["spacing_xy"];
  std::vector<std::vector<double>> layers;
  std::vector<double> zs;
  for (const auto& l : m["layers"]) {
    layers.push_back(io::read_f32(dir / l["raw"].get<std::string>(), static_cast<std::size_t>(w) * h));
    zs.push_back(l["z"]);
  }
  const int n = static_cast<int>(layers.size());
  REQUIRE(m["golden"].size() == 3);
  int nonzero_views = 0;
  for (const auto& g : m["golden"]) {
    const double du = g["du"], dv = g["dv"];
    nonzero_views += du != 0 || dv != 0;
    // Every layer weighs 1/n after front-to-back alpha 1/n, ..., 1.
    std::vector<double> frame(static_cast<std::size_t>(w) * h, 0.0);
    for (int i = 0; i < n; ++i)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          frame[y * w + x] +=
              sample(layers[i], w, h, x + du * zs[i] / spacing_xy, y + dv * zs[i] / spacing_xy) / n;
    const auto golden_raw = io::read_f32(dir / g["raw"].get<std::string>(), frame.size());
    const Image2D golden_png = io::read_png(dir / g["png"].get<std::string>());
    int worst = 0;
    for (std::size_t p = 0; p < frame.size(); ++p) {
      CHECK(golden_raw[p] == doctest::Approx(frame[p]).epsilon(1e-5));
      const int want = static_cast<int>(std::lround(linear_to_srgb(std::clamp(frame[p], 0.0, 1.0)) * 255));
      const int got = static_cast<int>(std::lround(linear_to_srgb(golden_png.data[p]) * 255));
      worst = std::max(worst, std::abs(want - got));
    }
    CHECK(worst <= 1);
  }
  CHECK(nonzero_views == 2);
}

TEST_CASE("default golden views stay inside the cone") {
  const auto v = default_golden_views(0.8);
  REQUIRE(v.size() == 3);
  CHECK(v[0].du == 0.0);
  CHECK(v[0].dv == 0.0);
  for (const auto& view : v) {
    CHECK(std::abs(view.du) <= 0.8);
    CHECK(std::abs(view.dv) <= 0.8);
  }
}

TEST_CASE("empty bundles are rejected") {
  testing::TempDir dir("bundle");
  try {
    export_bundle(dir.path(), {});
    FAIL("expected EmptyScene");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyScene);
  }
  write_json(dir / "manifest.json", {{"schema", kBundleSchema}, {"version", kBundleVersion}});
  try {
    load_bundle_manifest(dir.path());
    FAIL("expected EmptyScene");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyScene);
  }
}

TEST_CASE("schema problems name the field") {
  testing::TempDir dir("bundle");
  BundleContents c;
  c.layers = smooth_stack(2, 8, 8);
  export_bundle(dir.path(), c);
  const json good = read_json(dir / "manifest.json");

  json m = good;
  m["version"] = kBundleVersion + 1;
  write_json(dir / "manifest.json", m);
  CHECK(message_of(dir.path()).find("manifest.version") != std::string::npos);

  m = good;
  m["schema"] = "other";
  write_json(dir / "manifest.json", m);
  CHECK(message_of(dir.path()).find("manifest.schema") != std::string::npos);

  m = good;
  m["layers"][1]["png"] = "../outside.png";
  write_json(dir / "manifest.json", m);
  CHECK(message_of(dir.path()).find("escapes") != std::string::npos);

  write_json(dir / "manifest.json", good);
  fs::remove(dir / "layers/layer_001.png");
  const std::string missing = message_of(dir.path());
  CHECK(missing.find("manifest.layers[1].png") != std::string::npos);
  CHECK(missing.find("missing asset") != std::string::npos);

  m = good;
  m["view"]["width"] = "wide";
  write_json(dir / "manifest.json", m);
  CHECK(message_of(dir.path()).find("manifest.view.width") != std::string::npos);

  std::ofstream(dir / "manifest.json") << "{ not json";
  CHECK_THROWS_AS(load_bundle_manifest(dir.path()), Error);
}

TEST_CASE("sidecar length is checked") {
  testing::TempDir dir("bundle");
  BundleContents c;
  c.layers = smooth_stack(2, 8, 8);
  export_bundle(dir.path(), c);
  fs::resize_file(dir / "layers/layer_000.f32", 100);
  CHECK(message_of(dir.path()).find("sidecar length") != std::string::npos);
}

TEST_CASE("server exposes the bundle read-only") {
  testing::TempDir outer("serve");
  const fs::path root = outer / "bundle";
  BundleContents c;
  c.layers = smooth_stack(2, 8, 8);
  export_bundle(root, c);
  std::ofstream(outer / "secret.txt") << "outside";

  BundleServer server(root);
  const int port = server.start("127.0.0.1", 0);
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);

  auto manifest = client.Get("/manifest");
  REQUIRE(manifest);
  CHECK(manifest->status == 200);
  CHECK(json::parse(manifest->body)["schema"] == kBundleSchema);
  CHECK(manifest->get_header_value("Content-Type") == "application/json");

  auto png = client.Get("/layers/layer_000.png");
  REQUIRE(png);
  CHECK(png->status == 200);
  CHECK(png->body.size() == fs::file_size(root / "layers/layer_000.png"));

  for (const char* path : {"/missing.png", "/../secret.txt", "/layers/../../secret.txt",
                           "/%2e%2e/secret.txt", "/layers"}) {
    auto r = client.Get(path);
    REQUIRE(r);
    CHECK_MESSAGE(r->status == 404, path);
  }
  auto post = client.Post("/manifest", "x", "text/plain");
  REQUIRE(post);
  CHECK(post->status != 200);
  server.stop();
}

}
