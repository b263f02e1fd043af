#include "johnfield/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "johnfield/image.hpp"
#include "johnfield/io.hpp"

namespace johnfield {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field,
                         const std::string& what) const {
    std::ostringstream os;
    os << source_;
    if (node && node->source().begin) os << ":" << node->source().begin.line;
    os << ": " << field << ": " << what;
    throw Error(ErrorKind::Format, os.str());
  }

  const toml::table& table(const toml::table& parent, const std::string& key,
                           const std::string& field) const {
    const toml::node* n = parent.get(key);
    if (!n) fail(&parent, field, "missing table");
    if (!n->is_table()) fail(n, field, "expected a table");
    return *n->as_table();
  }

  double number(const toml::table& t, const std::string& key, const std::string& field,
                std::optional<double> fallback = std::nullopt) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(&t, field, "missing value");
    }
    if (auto v = n->value<double>()) return *v;
    fail(n, field, "expected a number");
  }

  int integer(const toml::table& t, const std::string& key, const std::string& field,
              std::optional<int> fallback = std::nullopt) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(&t, field, "missing value");
    }
    if (!n->is_integer()) fail(n, field, "expected an integer");
    return static_cast<int>(n->as_integer()->get());
  }

  std::string string(const toml::table& t, const std::string& key, const std::string& field,
                     std::optional<std::string> fallback = std::nullopt) const {
    const toml::node* n = t.get(key);
    if (!n) {
      if (fallback) return *fallback;
      fail(&t, field, "missing value");
    }
    if (auto v = n->value<std::string>()) return *v;
    fail(n, field, "expected a string");
  }

  template <std::size_t N>
  std::array<double, N> vec(const toml::table& t, const std::string& key,
                            const std::string& field) const {
    const toml::node* n = t.get(key);
    if (!n) fail(&t, field, "missing value");
    const toml::array* a = n->as_array();
    if (!a || a->size() != N) fail(n, field, "expected an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      auto v = a->get(i)->value<double>();
      if (!v) fail(n, field, "expected an array of numbers");
      out[i] = *v;
    }
    return out;
  }

  double positive(double v, const toml::table& t, const std::string& key,
                  const std::string& field) const {
    if (!(v > 0)) fail(t.get(key) ? t.get(key) : &t, field, "must be > 0");
    return v;
  }

 private:
  std::string source_;
};

LightfieldShape read_lightfield(const Reader& r, const toml::table& t) {
  LightfieldShape s;
  s.nu = static_cast<int>(r.positive(r.integer(t, "nu", "lightfield.nu"), t, "nu", "lightfield.nu"));
  s.nv = static_cast<int>(r.positive(r.integer(t, "nv", "lightfield.nv"), t, "nv", "lightfield.nv"));
  s.nx = static_cast<int>(r.positive(r.integer(t, "nx", "lightfield.nx"), t, "nx", "lightfield.nx"));
  s.ny = static_cast<int>(r.positive(r.integer(t, "ny", "lightfield.ny"), t, "ny", "lightfield.ny"));
  s.pitch_uv = r.positive(r.number(t, "pitch_uv", "lightfield.pitch_uv", 1.0), t, "pitch_uv",
                          "lightfield.pitch_uv");
  s.pitch_xy = r.positive(r.number(t, "pitch_xy", "lightfield.pitch_xy", 1.0), t, "pitch_xy",
                          "lightfield.pitch_xy");
  return s;
}

Texture read_texture(const Reader& r, const toml::table& layer, const std::string& field,
                     const std::filesystem::path& base_dir, std::uint64_t seed) {
  const toml::table& t = r.table(layer, "texture", field);
  Texture tex;
  tex.spacing = r.positive(r.number(t, "spacing", field + ".spacing", 1.0), t, "spacing",
                           field + ".spacing");
  if (t.contains("path")) {
    const std::filesystem::path path = base_dir / r.string(t, "path", field + ".path");
    if (!std::filesystem::exists(path))
      r.fail(t.get("path"), field + ".path", "file not found: " + path.string());
    try {
      tex.image = io::read_png(path);
    } catch (const Error& e) {
      r.fail(t.get("path"), field + ".path", e.what());
    }
    return tex;
  }
  const std::string kind = r.string(t, "kind", field + ".kind");
  if (kind == "noise") {
    const int w = r.integer(t, "width", field + ".width");
    const int h = r.integer(t, "height", field + ".height");
    if (w <= 0 || h <= 0) r.fail(&t, field, "width and height must be > 0");
    const double smooth = r.number(t, "smoothness", field + ".smoothness", 2.0);
    tex.image = noise_texture(w, h, smooth, seed);
  } else if (kind == "constant") {
    const int w = r.integer(t, "width", field + ".width");
    const int h = r.integer(t, "height", field + ".height");
    if (w <= 0 || h <= 0) r.fail(&t, field, "width and height must be > 0");
    tex.image = Image2D(w, h, r.number(t, "value", field + ".value"));
  } else {
    r.fail(t.get("kind"), field + ".kind", "unknown texture kind '" + kind + "' (noise|constant)");
  }
  return tex;
}

// Binary coverage sampled at texel centers, in the texture's world frame.
Image2D read_mask(const Reader& r, const toml::table& layer, const std::string& field,
                  const Texture& tex) {
  const toml::table& m = r.table(layer, "mask", field);
  const std::string kind = r.string(m, "kind", field + ".kind");
  const int w = tex.image.width, h = tex.image.height;
  Image2D alpha(w, h);
  auto world = [&](int tx, int ty) {
    return std::array<double, 2>{(tx - 0.5 * (w - 1)) * tex.spacing, (ty - 0.5 * (h - 1)) * tex.spacing};
  };
  if (kind == "halfplane") {
    const auto n = r.vec<2>(m, "normal", field + ".normal");
    const double offset = r.number(m, "offset", field + ".offset", 0.0);
    if (n[0] == 0 && n[1] == 0) r.fail(m.get("normal"), field + ".normal", "zero normal");
    for (int ty = 0; ty < h; ++ty)
      for (int tx = 0; tx < w; ++tx) {
        const auto p = world(tx, ty);
        alpha(tx, ty) = n[0] * p[0] + n[1] * p[1] >= offset ? 1.0 : 0.0;
      }
  } else if (kind == "rect") {
    const auto lo = r.vec<2>(m, "min", field + ".min");
    const auto hi = r.vec<2>(m, "max", field + ".max");
    for (int ty = 0; ty < h; ++ty)
      for (int tx = 0; tx < w; ++tx) {
        const auto p = world(tx, ty);
        alpha(tx, ty) = p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1] ? 1.0 : 0.0;
      }
  } else {
    r.fail(m.get("kind"), field + ".kind", "unknown mask kind '" + kind + "' (halfplane|rect)");
  }
  return alpha;
}

}  // namespace

SceneSpec parse_scene(const std::string& text, const std::filesystem::path& base_dir,
                      const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source_name << ":" << e.source().begin.line << ": " << e.description();
    throw Error(ErrorKind::Format, os.str());
  }
  const Reader r(source_name);
  SceneSpec spec;
  spec.version = r.integer(root, "version", "version");
  if (spec.version != kSceneVersion)
    r.fail(root.get("version"), "version",
           "unsupported scene version " + std::to_string(spec.version) + " (expected " +
               std::to_string(kSceneVersion) + ")");
  const std::string kind = r.string(root, "kind", "kind");
  if (kind == "layers") {
    spec.kind = SceneKind::Layers;
  } else if (kind == "blobs") {
    spec.kind = SceneKind::Blobs;
  } else {
    r.fail(root.get("kind"), "kind", "unknown scene kind '" + kind + "' (layers|blobs)");
  }
  const int seed = r.integer(root, "seed", "seed", 0);
  if (seed < 0) r.fail(root.get("seed"), "seed", "must be >= 0");
  spec.seed = static_cast<std::uint64_t>(seed);

  if (root.contains("lightfield")) spec.lightfield = read_lightfield(r, r.table(root, "lightfield", "lightfield"));

  if (spec.kind == SceneKind::Layers) {
    if (!spec.lightfield) r.fail(&root, "lightfield", "missing table");
    const toml::node* layers = root.get("layer");
    if (!layers) throw Error(ErrorKind::EmptyScene, source_name + ": scene has no [[layer]] entries");
    const toml::array* arr = layers->as_array();
    if (!arr || !arr->is_array_of_tables()) r.fail(layers, "layer", "expected [[layer]] tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table& t = *arr->get(i)->as_table();
      const std::string field = "layer[" + std::to_string(i) + "]";
      SceneLayer layer;
      layer.disparity_c = r.number(t, "disparity", field + ".disparity");
      layer.opacity = r.number(t, "opacity", field + ".opacity", 1.0);
      if (layer.opacity < 0 || layer.opacity > 1)
        r.fail(t.get("opacity"), field + ".opacity", "must be in [0, 1]");
      layer.texture = read_texture(r, t, field + ".texture", base_dir, spec.seed * 1000003u + i);
      if (t.contains("mask")) layer.texture.alpha = read_mask(r, t, field + ".mask", layer.texture);
      spec.layers.push_back(std::move(layer));
    }
  } else {
    const toml::table& v = r.table(root, "volume", "volume");
    GridSpec g;
    g.nx = r.integer(v, "nx", "volume.nx");
    g.ny = r.integer(v, "ny", "volume.ny");
    g.nz = r.integer(v, "nz", "volume.nz");
    if (g.nx <= 0 || g.ny <= 0 || g.nz <= 0) r.fail(&v, "volume", "dimensions must be > 0");
    g.spacing = r.positive(r.number(v, "spacing", "volume.spacing", 1.0), v, "spacing", "volume.spacing");
    if (v.contains("origin")) {
      const auto o = r.vec<3>(v, "origin", "volume.origin");
      g.origin = {o[0], o[1], o[2]};
    } else {
      g.origin = {-0.5 * (g.nx - 1) * g.spacing, -0.5 * (g.ny - 1) * g.spacing,
                  -0.5 * (g.nz - 1) * g.spacing};
    }
    spec.volume = g;
    const toml::node* blobs = root.get("blob");
    if (!blobs) throw Error(ErrorKind::EmptyScene, source_name + ": scene has no [[blob]] entries");
    const toml::array* arr = blobs->as_array();
    if (!arr || !arr->is_array_of_tables()) r.fail(blobs, "blob", "expected [[blob]] tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table& t = *arr->get(i)->as_table();
      const std::string field = "blob[" + std::to_string(i) + "]";
      const auto c = r.vec<3>(t, "center", field + ".center");
      GaussianBlob b{{c[0], c[1], c[2]},
                     r.number(t, "sigma", field + ".sigma"),
                     r.number(t, "amplitude", field + ".amplitude", 1.0)};
      if (!(b.sigma > 0)) r.fail(t.get("sigma"), field + ".sigma", "must be > 0");
      if (b.amplitude < 0) r.fail(t.get("amplitude"), field + ".amplitude", "must be >= 0");
      spec.blobs.push_back(b);
    }
  }
  return spec;
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open scene " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return parse_scene(text.str(), path.parent_path(), path.string());
}

}  // namespace johnfield
