#pragma once

// Viewer bundles: a directory holding manifest.json, PNG frames and float32
// sidecars, plus a read-only static HTTP server for it.
//
// Layout:
//   manifest.json
//   layers/layer_NNN.png|.f32        processed focal-stack layers, front first
//   golden/view_N.png|.f32           render_orthographic at fixed viewpoints
//   stack/frame_NNNN.png|.f32        kernel-filtered focus stack
//   depth.png|.f32, uncertainty.png|.f32
//   lightfield/mi_VV_UU.png|.f32     microimages for live shift-and-blend
//
// PNGs are 8-bit sRGB-encoded gray (depth and uncertainty: 16-bit linear);
// sidecars hold the exact linear values, row-major.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "johnfield/depth.hpp"
#include "johnfield/johnxform.hpp"
#include "johnfield/lfcore.hpp"

namespace johnfield {

inline constexpr const char* kBundleSchema = "johnfield-bundle";
inline constexpr int kBundleVersion = 1;

struct BundleView {
  double du = 0.0, dv = 0.0;
};

struct BundleContents {
  std::optional<FocalStackImages> layers;
  double max_slope = 1.0;          // view cone recorded for the viewer
  std::vector<BundleView> golden;  // empty: (0,0) and two nonzero defaults
  std::optional<FocusStack> stack;
  std::optional<DepthMap> depth;
  std::optional<UncertaintyMap> uncertainty;
  std::optional<Lightfield> lightfield;
};

/// Writes the bundle into `dir` (created if needed). Throws EmptyScene when
/// there is nothing to export.
void export_bundle(const std::filesystem::path& dir, const BundleContents& contents);

/// The default golden viewpoints for a cone: (0,0), (s,0), (-s/2,s), s = max_slope / 2.
std::vector<BundleView> default_golden_views(double max_slope);

struct BundleSummary {
  int version = 0;
  int layer_count = 0;
  int golden_count = 0;
  int stack_frames = 0;
  bool has_depth = false;
  bool has_uncertainty = false;
  bool has_lightfield = false;
};

/// Schema check of manifest.json: schema name and version, field types,
/// consistent sizes, every referenced asset present inside the bundle with
/// the sidecar length its dimensions imply. Throws Format naming the field.
BundleSummary load_bundle_manifest(const std::filesystem::path& dir);

/// Read-only HTTP server over a bundle directory. GET /manifest returns
/// manifest.json; GET /<relative path> returns files under the root; any
/// other path, including ones escaping the root, is 404.
class BundleServer {
 public:
  explicit BundleServer(std::filesystem::path root);
  ~BundleServer();
  BundleServer(const BundleServer&) = delete;
  BundleServer& operator=(const BundleServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace johnfield
