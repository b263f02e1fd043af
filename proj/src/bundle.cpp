#include "johnfield/bundle.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "johnfield/io.hpp"

namespace johnfield {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string numbered(const std::string& stem, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, i);
  return stem + buf;
}

json write_image(const fs::path& dir, const std::string& rel, const Image2D& img, bool png16 = false) {
  fs::create_directories((dir / rel).parent_path());
  if (png16) {
    io::write_png16(dir / (rel + ".png"), img);
  } else {
    io::write_png_srgb(dir / (rel + ".png"), img);
  }
  io::write_f32(dir / (rel + ".f32"), std::span<const double>(img.data));
  return {{"png", rel + ".png"}, {"raw", rel + ".f32"}};
}

Image2D map_image(const PixelMap& m) { return Image2D(m.width, m.height, m.values); }

}  // namespace

std::vector<BundleView> default_golden_views(double max_slope) {
  const double s = 0.5 * (std::isfinite(max_slope) ? max_slope : 1.0);
  return {{0.0, 0.0}, {s, 0.0}, {-0.5 * s, s}};
}

void export_bundle(const fs::path& dir, const BundleContents& c) {
  if (!c.layers && !c.stack && !c.depth && !c.uncertainty && !c.lightfield)
    throw Error(ErrorKind::EmptyScene, "export_bundle: nothing to export");
  if (!(c.max_slope > 0) || !std::isfinite(c.max_slope))
    throw Error(ErrorKind::InvalidArgument, "export_bundle: max_slope must be finite and > 0");
  fs::create_directories(dir);
  json m;
  m["schema"] = kBundleSchema;
  m["version"] = kBundleVersion;

  if (c.layers) {
    const FocalStackImages& st = *c.layers;
    st.validate();
    json layers = json::array();
    for (int i = 0; i < st.size(); ++i) {
      json l = write_image(dir, "layers/" + numbered("layer_", i, 3), st.layers[static_cast<std::size_t>(i)]);
      l["index"] = i;
      l["z"] = st.layer_z(i);
      layers.push_back(l);
    }
    m["view"] = {{"width", st.layers.front().width},
                 {"height", st.layers.front().height},
                 {"layer_spacing", st.layer_spacing},
                 {"spacing_xy", st.spacing_xy},
                 {"max_slope", c.max_slope},
                 {"compositing", "front alpha 1/n ... back alpha 1, shift (du, dv) * z / spacing_xy"}};
    m["layers"] = layers;
    const auto views = c.golden.empty() ? default_golden_views(c.max_slope) : c.golden;
    json golden = json::array();
    for (std::size_t i = 0; i < views.size(); ++i) {
      const Image2D frame = render_orthographic(st, views[i].du, views[i].dv, ViewCone{c.max_slope});
      json g = write_image(dir, "golden/" + numbered("view_", static_cast<int>(i), 1), frame);
      g["du"] = views[i].du;
      g["dv"] = views[i].dv;
      golden.push_back(g);
    }
    m["golden"] = golden;
  }

  if (c.stack) {
    const FocusStack& s = *c.stack;
    s.validate();
    float peak = 0.0f;
    for (float v : s.frames) peak = std::max(peak, std::abs(v));
    const double display_scale = peak > 0 ? 1.0 / peak : 1.0;
    json frames = json::array();
    for (int i = 0; i < s.n_steps; ++i) {
      const auto raw = s.frame(i);
      std::vector<double> display(raw.size());
      for (std::size_t p = 0; p < raw.size(); ++p) display[p] = std::clamp(raw[p] * display_scale, 0.0, 1.0);
      const std::string rel = "stack/" + numbered("frame_", i, 4);
      fs::create_directories(dir / "stack");
      io::write_png_srgb(dir / (rel + ".png"), Image2D(s.width, s.height, std::move(display)));
      io::write_f32(dir / (rel + ".f32"), raw);
      frames.push_back({{"index", i}, {"focus", s.focus(i)}, {"png", rel + ".png"}, {"raw", rel + ".f32"}});
    }
    m["stack"] = {{"f_min", s.f_min}, {"f_max", s.f_max}, {"steps", s.n_steps},
                  {"width", s.width}, {"height", s.height}, {"display_scale", display_scale},
                  {"frames", frames}};
  }

  auto write_map = [&](const char* key, const PixelMap& pm) {
    json j = write_image(dir, key, map_image(pm), true);
    j["width"] = pm.width;
    j["height"] = pm.height;
    std::vector<double> valid(pm.valid.begin(), pm.valid.end());
    const std::string mask_rel = std::string(key) + "_valid.f32";
    io::write_f32(dir / mask_rel, std::span<const double>(valid));
    j["valid"] = mask_rel;
    m[key] = j;
  };
  if (c.depth) write_map("depth", *c.depth);
  if (c.uncertainty) write_map("uncertainty", *c.uncertainty);

  if (c.lightfield) {
    const Lightfield& lf = *c.lightfield;
    double peak = 0.0;
    for (double v : lf.data()) peak = std::max(peak, std::abs(v));
    const double display_scale = peak > 0 ? 1.0 / peak : 1.0;
    json mis = json::array();
    for (int iv = 0; iv < lf.nv(); ++iv)
      for (int iu = 0; iu < lf.nu(); ++iu) {
        const auto plane = lf.microimage(iu, iv);
        std::vector<double> display(plane.size());
        for (std::size_t p = 0; p < plane.size(); ++p)
          display[p] = std::clamp(plane[p] * display_scale, 0.0, 1.0);
        const std::string rel = "lightfield/mi_" + numbered("", iv, 2) + "_" + numbered("", iu, 2);
        fs::create_directories(dir / "lightfield");
        io::write_png_srgb(dir / (rel + ".png"), Image2D(lf.nx(), lf.ny(), std::move(display)));
        io::write_f32(dir / (rel + ".f32"), plane);
        mis.push_back({{"u", iu}, {"v", iv}, {"png", rel + ".png"}, {"raw", rel + ".f32"}});
      }
    m["lightfield"] = {{"nu", lf.nu()}, {"nv", lf.nv()}, {"nx", lf.nx()}, {"ny", lf.ny()},
                       {"pitch_uv", lf.shape().pitch_uv}, {"pitch_xy", lf.shape().pitch_xy},
                       {"display_scale", display_scale}, {"microimages", mis}};
  }

  std::ofstream os(dir / "manifest.json");
  if (!os) throw Error(ErrorKind::Io, "cannot write " + (dir / "manifest.json").string());
  os << m.dump(2) << '\n';
}

// --- loader -----------------------------------------------------------------

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Format, "manifest." + field + ": " + what);
}

const json& member(const json& j, const std::string& key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) schema_error(field, "missing");
  return j.at(key);
}

int positive_int(const json& j, const std::string& key, const std::string& field) {
  const json& v = member(j, key, field);
  if (!v.is_number_integer() || v.get<long long>() <= 0) schema_error(field, "expected a positive integer");
  return v.get<int>();
}

double finite_number(const json& j, const std::string& key, const std::string& field) {
  const json& v = member(j, key, field);
  if (!v.is_number() || !std::isfinite(v.get<double>())) schema_error(field, "expected a finite number");
  return v.get<double>();
}

// Asset path must be relative, stay inside the root and exist.
fs::path asset(const fs::path& root, const json& j, const std::string& key, const std::string& field) {
  const json& v = member(j, key, field);
  if (!v.is_string()) schema_error(field, "expected a path string");
  const fs::path rel(v.get<std::string>());
  if (rel.is_absolute()) schema_error(field, "absolute path not allowed");
  for (const auto& part : rel)
    if (part == "..") schema_error(field, "path escapes the bundle root");
  const fs::path p = root / rel;
  if (!fs::is_regular_file(p)) schema_error(field, "missing asset " + rel.string());
  return p;
}

void check_image(const fs::path& root, const json& j, const std::string& field, int w, int h) {
  asset(root, j, "png", field + ".png");
  const fs::path raw = asset(root, j, "raw", field + ".raw");
  if (fs::file_size(raw) != static_cast<std::uintmax_t>(w) * h * 4)
    schema_error(field + ".raw", "sidecar length does not match " + std::to_string(w) + "x" + std::to_string(h));
}

}  // namespace

BundleSummary load_bundle_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "bundle has no manifest: " + path.string());
  json m;
  try {
    m = json::parse(is);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Format, path.string() + ": " + e.what());
  }
  if (!m.is_object()) schema_error("", "expected an object");
  const json& schema = member(m, "schema", "schema");
  if (!schema.is_string() || schema.get<std::string>() != kBundleSchema)
    schema_error("schema", std::string("expected '") + kBundleSchema + "'");
  const json& version = member(m, "version", "version");
  if (!version.is_number_integer() || version.get<int>() != kBundleVersion)
    schema_error("version", "unsupported schema version " + version.dump() + " (expected " +
                                std::to_string(kBundleVersion) + ")");
  BundleSummary s;
  s.version = kBundleVersion;

  if (m.contains("layers")) {
    const json& view = member(m, "view", "view");
    const int w = positive_int(view, "width", "view.width"), h = positive_int(view, "height", "view.height");
    if (finite_number(view, "layer_spacing", "view.layer_spacing") <= 0) schema_error("view.layer_spacing", "must be > 0");
    if (finite_number(view, "spacing_xy", "view.spacing_xy") <= 0) schema_error("view.spacing_xy", "must be > 0");
    if (finite_number(view, "max_slope", "view.max_slope") <= 0) schema_error("view.max_slope", "must be > 0");
    const json& layers = m.at("layers");
    if (!layers.is_array() || layers.empty()) schema_error("layers", "expected a non-empty array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string f = "layers[" + std::to_string(i) + "]";
      finite_number(layers[i], "z", f + ".z");
      check_image(dir, layers[i], f, w, h);
    }
    s.layer_count = static_cast<int>(layers.size());
    const json& golden = member(m, "golden", "golden");
    if (!golden.is_array()) schema_error("golden", "expected an array");
    for (std::size_t i = 0; i < golden.size(); ++i) {
      const std::string f = "golden[" + std::to_string(i) + "]";
      finite_number(golden[i], "du", f + ".du");
      finite_number(golden[i], "dv", f + ".dv");
      check_image(dir, golden[i], f, w, h);
    }
    s.golden_count = static_cast<int>(golden.size());
  }
  if (m.contains("stack")) {
    const json& st = m.at("stack");
    const int w = positive_int(st, "width", "stack.width"), h = positive_int(st, "height", "stack.height");
    const int steps = positive_int(st, "steps", "stack.steps");
    if (!(finite_number(st, "f_min", "stack.f_min") < finite_number(st, "f_max", "stack.f_max")))
      schema_error("stack.f_min", "must be < f_max");
    const json& frames = member(st, "frames", "stack.frames");
    if (!frames.is_array() || static_cast<int>(frames.size()) != steps)
      schema_error("stack.frames", "expected " + std::to_string(steps) + " frames");
    for (std::size_t i = 0; i < frames.size(); ++i)
      check_image(dir, frames[i], "stack.frames[" + std::to_string(i) + "]", w, h);
    s.stack_frames = steps;
  }
  for (const char* key : {"depth", "uncertainty"}) {
    if (!m.contains(key)) continue;
    const json& d = m.at(key);
    const std::string f = key;
    const int w = positive_int(d, "width", f + ".width"), h = positive_int(d, "height", f + ".height");
    check_image(dir, d, f, w, h);
    const fs::path valid = asset(dir, d, "valid", f + ".valid");
    if (fs::file_size(valid) != static_cast<std::uintmax_t>(w) * h * 4)
      schema_error(f + ".valid", "mask length does not match the map size");
    (f == "depth" ? s.has_depth : s.has_uncertainty) = true;
  }
  if (m.contains("lightfield")) {
    const json& lf = m.at("lightfield");
    const int nu = positive_int(lf, "nu", "lightfield.nu"), nv = positive_int(lf, "nv", "lightfield.nv");
    const int nx = positive_int(lf, "nx", "lightfield.nx"), ny = positive_int(lf, "ny", "lightfield.ny");
    const json& mis = member(lf, "microimages", "lightfield.microimages");
    if (!mis.is_array() || static_cast<int>(mis.size()) != nu * nv)
      schema_error("lightfield.microimages", "expected nu*nv entries");
    for (std::size_t i = 0; i < mis.size(); ++i)
      check_image(dir, mis[i], "lightfield.microimages[" + std::to_string(i) + "]", nx, ny);
    s.has_lightfield = true;
  }
  if (s.layer_count == 0 && s.stack_frames == 0 && !s.has_depth && !s.has_uncertainty && !s.has_lightfield)
    throw Error(ErrorKind::EmptyScene, "bundle manifest lists no content");
  return s;
}

// --- server -----------------------------------------------------------------

struct BundleServer::Impl {
  fs::path root;
  httplib::Server server;
  std::thread thread;
};

namespace {

std::string content_type(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "text/javascript";
  return "application/octet-stream";
}

bool inside(const fs::path& root, const fs::path& p) {
  auto r = root.begin();
  auto q = p.begin();
  for (; r != root.end(); ++r, ++q)
    if (q == p.end() || *r != *q) return false;
  return true;
}

void send_file(const fs::path& p, httplib::Response& res) {
  std::ifstream is(p, std::ios::binary);
  if (!is) {
    res.status = 404;
    return;
  }
  std::string body((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  res.set_content(std::move(body), content_type(p));
  res.status = 200;
}

}  // namespace

BundleServer::BundleServer(fs::path root) : impl_(std::make_unique<Impl>()) {
  if (!fs::is_directory(root)) throw Error(ErrorKind::Io, "bundle root is not a directory: " + root.string());
  impl_->root = fs::canonical(root);
  Impl* impl = impl_.get();
  impl->server.Get("/manifest", [impl](const httplib::Request&, httplib::Response& res) {
    send_file(impl->root / "manifest.json", res);
  });
  impl->server.Get(R"(/(.+))", [impl](const httplib::Request& req, httplib::Response& res) {
    res.status = 404;
    const fs::path rel(req.matches[1].str());
    if (rel.is_absolute()) return;
    std::error_code ec;
    const fs::path target = fs::weakly_canonical(impl->root / rel, ec);
    if (ec || !inside(impl->root, target) || !fs::is_regular_file(target)) return;
    send_file(target, res);
  });
  impl->server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) res.set_content("not found\n", "text/plain");
  });
}

BundleServer::~BundleServer() { stop(); }

int BundleServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::Io, "serve: cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorKind::Io, "serve: cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void BundleServer::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port))
    throw Error(ErrorKind::Io, "serve: cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

void BundleServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace johnfield
