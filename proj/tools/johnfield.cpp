// johnfield command-line tool: scene synthesis, focal-stack inversion, depth
// from kernel-filtered focus stacks, spectral gap tables and viewer bundles.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "johnfield/bundle.hpp"
#include "johnfield/depth.hpp"
#include "johnfield/io.hpp"
#include "johnfield/johnxform.hpp"
#include "johnfield/kernels.hpp"
#include "johnfield/scene.hpp"
#include "johnfield/spectral.hpp"
#include "johnfield/synth.hpp"

namespace fs = std::filesystem;
using namespace johnfield;

namespace {

// Thrown for bad flag values found after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  std::istringstream is(text);
  double a = 0, b = 0;
  char comma = 0;
  if (!(is >> a >> comma >> b) || comma != ',' || !(is >> std::ws).eof())
    throw UsageError(std::string(what) + ": expected 'a,b', got '" + text + "'");
  return {a, b};
}

std::pair<int, int> parse_size(const std::string& text) {
  std::istringstream is(text);
  int w = 0, h = 0;
  char x = 0;
  if (!(is >> w >> x >> h) || (x != 'x' && x != 'X') || !(is >> std::ws).eof() || w <= 0 || h <= 0)
    throw UsageError("--size: expected WxH with positive integers, got '" + text + "'");
  return {w, h};
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

Stencil4D kernel_or_usage(const std::string& name) {
  try {
    return stencil_by_name(name);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument)
      throw UsageError("--kernel: " + std::string(e.what()) + " (john|john9|asgN|asgT2:R1,R2)");
    throw;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  std::string scene, out, measure = "dm";
  bool focal_stack = false;
};

int run_synth(const SynthArgs& a) {
  const SceneSpec spec = load_scene(a.scene);
  const fs::path out(a.out);
  const std::string ext = out.extension().string();
  if (ext != ".lfr" && ext != ".vol") throw UsageError("--out must end in .lfr or .vol");
  if (spec.kind == SceneKind::Layers) {
    if (ext != ".lfr") throw UsageError("a layers scene produces a lightfield (.lfr)");
    const Lightfield lf = layered_scene_lightfield(spec.layers, *spec.lightfield);
    io::write_lightfield(out, lf);
    std::cout << "lightfield " << lf.nu() << "x" << lf.nv() << "x" << lf.nx() << "x" << lf.ny()
              << " -> " << out.string() << '\n';
    return 0;
  }
  const VolumeGrid vol = gaussian_blob_volume(*spec.volume, spec.blobs);
  if (ext == ".vol") {
    const VolumeGrid result = a.focal_stack ? dual_transform_volume(vol) : vol;
    io::write_volume(out, result);
    std::cout << (a.focal_stack ? "focal stack " : "volume ") << result.nx() << "x" << result.ny()
              << "x" << result.nz() << " -> " << out.string() << '\n';
    return 0;
  }
  if (!spec.lightfield) throw Error(ErrorKind::Format, a.scene + ": lightfield: missing table");
  const LineMeasure measure = a.measure == "dz" ? LineMeasure::AlongZ : LineMeasure::Euclidean;
  const double z0 = vol.origin().z, z1 = z0 + (vol.nz() - 1) * vol.spacing();
  const Lightfield lf = forward_john(vol, *spec.lightfield, ZRange{z0, z1}, measure);
  io::write_lightfield(out, lf);
  std::cout << "lightfield " << lf.nu() << "x" << lf.nv() << "x" << lf.nx() << "x" << lf.ny()
            << " -> " << out.string() << '\n';
  return 0;
}

// --- invert-stack -----------------------------------------------------------

struct InvertArgs {
  std::string stack, out, view_dir;
  std::vector<std::string> layer_pngs, views;
  double layer_spacing = 0, spacing_xy = 1, lo = 5, hi = 95, max_slope = 1;
};

int run_invert(const InvertArgs& a) {
  VolumeGrid input;
  if (!a.stack.empty()) {
    if (!a.layer_pngs.empty()) throw UsageError("give either --stack or --layers, not both");
    input = io::read_volume(a.stack);
  } else if (!a.layer_pngs.empty()) {
    FocalStackImages imgs;
    imgs.spacing_xy = a.spacing_xy;
    for (const auto& p : a.layer_pngs) imgs.layers.push_back(io::read_png(p));
    input = volume_from_stack(imgs);
  } else {
    throw UsageError("one of --stack or --layers is required");
  }
  if (input.nz() < 2) throw Error(ErrorKind::InvalidArgument, "invert-stack needs at least 2 layers");

  const VolumeGrid inverted = inverse_john(input);
  const VolumeGrid rescaled = parseval_rescale(inverted, input);
  const LevelsResult levels = percentile_levels(rescaled.data(), a.lo, a.hi);
  if (levels.degenerate) std::cerr << "warning: levels are degenerate (constant volume)\n";
  const VolumeGrid processed = rescaled.with_data(levels.values);
  io::write_volume(a.out, processed);
  std::cout << "volume " << processed.nx() << "x" << processed.ny() << "x" << processed.nz()
            << " levels [" << format_number(levels.lo) << ", " << format_number(levels.hi) << "] -> "
            << a.out << '\n';

  if (!a.views.empty()) {
    const double spacing = a.layer_spacing > 0 ? a.layer_spacing : processed.spacing();
    const FocalStackImages stack = stack_from_volume(processed, spacing);
    const fs::path dir = a.view_dir.empty() ? fs::path(a.out).parent_path() : fs::path(a.view_dir);
    if (!dir.empty()) fs::create_directories(dir);
    for (const auto& v : a.views) {
      const auto [du, dv] = parse_pair(v, "--view");
      const Image2D img = render_orthographic(stack, du, dv, ViewCone{a.max_slope});
      const std::string stem = "view_" + format_number(du) + "_" + format_number(dv);
      io::write_png_srgb(dir / (stem + ".png"), img);
      io::write_f32(dir / (stem + ".f32"), std::span<const double>(img.data));
      std::cout << "view " << v << " -> " << (dir / (stem + ".png")).string() << '\n';
    }
  }
  return 0;
}

// --- depth ------------------------------------------------------------------

struct DepthArgs {
  std::string lightfield, kernel = "asg1", out_dir = ".", size, interp = "cubic";
  std::vector<std::string> regions;
  double fmin = 6, fmax = 13, fraction = 0.05;
  int steps = 256, aperture = 0;
};

FocusStackOptions stack_options(const Lightfield& lf, double fmin, double fmax, int steps,
                                int aperture, const std::string& size, const std::string& interp) {
  FocusStackOptions opt;
  opt.interpolation = interp == "bilinear" ? TapInterpolation::Bilinear : TapInterpolation::Cubic;
  opt.f_min = fmin;
  opt.f_max = fmax;
  opt.steps = steps;
  opt.aperture = aperture;
  if (size.empty()) {
    opt.out_width = lf.nx();
    opt.out_height = lf.ny();
  } else {
    std::tie(opt.out_width, opt.out_height) = parse_size(size);
  }
  if (steps < 2) throw UsageError("--steps must be >= 2");
  if (!(fmin < fmax)) throw UsageError("--fmin must be < --fmax");
  if (fmin < 0) throw UsageError("--fmin must be >= 0");
  return opt;
}

int run_depth(const DepthArgs& a) {
  const Stencil4D stencil = kernel_or_usage(a.kernel);
  const Lightfield lf = io::read_lightfield(a.lightfield);
  const FocusStackOptions opt = stack_options(lf, a.fmin, a.fmax, a.steps, a.aperture, a.size, a.interp);
  const FocusStack stack = kernel_focus_stack(lf, stencil, opt);
  const DepthMap depth = depth_from_stack(stack);
  const UncertaintyMap unc = uncertainty_from_stack(stack, a.fraction);

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  auto write_map = [&](const std::string& stem, const PixelMap& m) {
    io::write_png16(dir / (stem + ".png"), Image2D(m.width, m.height, m.values));
    io::write_f32(dir / (stem + ".f32"), std::span<const double>(m.values));
  };
  write_map("depth", depth);
  write_map("uncertainty", unc);
  std::vector<double> valid(depth.valid.begin(), depth.valid.end());
  io::write_f32(dir / "valid.f32", std::span<const double>(valid));

  std::vector<double> valid_unc, valid_depth;
  int flat = 0;
  for (std::size_t p = 0; p < unc.values.size(); ++p) {
    if (!unc.valid[p]) continue;
    if (unc.flat[p]) ++flat;
    valid_unc.push_back(unc.values[p]);
    valid_depth.push_back(depth.values[p]);
  }
  std::ofstream report(dir / "report.txt");
  auto line = [&](const std::string& key, const std::string& value) {
    report << key << ": " << value << '\n';
    std::cout << key << ": " << value << '\n';
  };
  line("kernel", a.kernel);
  line("taps", std::to_string(stencil.taps.size()));
  line("f_min", format_number(opt.f_min));
  line("f_max", format_number(opt.f_max));
  line("steps", std::to_string(opt.steps));
  line("aperture", std::to_string(opt.aperture > 0 ? opt.aperture : max_valid_aperture(lf, stencil)));
  line("size", std::to_string(opt.out_width) + "x" + std::to_string(opt.out_height));
  line("interpolation", a.interp);
  line("fraction", format_number(a.fraction));
  line("valid_pixels", std::to_string(valid_unc.size()));
  line("flat_pixels", std::to_string(flat));
  line("median_depth", format_number(median(valid_depth)));
  line("median_uncertainty", format_number(median(valid_unc)));
  // Region name:x0,y0,x1,y1 (inclusive-exclusive, output pixels): the stack
  // frame where the region's mean valid brightness is smallest.
  for (const auto& r : a.regions) {
    const auto colon = r.find(':');
    if (colon == std::string::npos) throw UsageError("--region: expected name:x0,y0,x1,y1");
    const auto box = parse_list(r.substr(colon + 1), "--region");
    if (box.size() != 4) throw UsageError("--region: expected four coordinates");
    const int x0 = std::max(0, static_cast<int>(box[0])), y0 = std::max(0, static_cast<int>(box[1]));
    const int x1 = std::min(stack.width, static_cast<int>(box[2]));
    const int y1 = std::min(stack.height, static_cast<int>(box[3]));
    int best = -1;
    double best_mean = 0;
    for (int i = 0; i < stack.n_steps; ++i) {
      double acc = 0;
      int n = 0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
          if (depth.valid_at(x, y)) {
            acc += stack.at(i, x, y);
            ++n;
          }
      if (n == 0) break;
      if (best < 0 || acc / n < best_mean) {
        best = i;
        best_mean = acc / n;
      }
    }
    line("region " + r.substr(0, colon),
         best < 0 ? "no valid pixels"
                  : "darkest_frame " + std::to_string(best) + " focus " + format_number(stack.focus(best)));
  }
  return 0;
}

// --- gap --------------------------------------------------------------------

struct GapArgs {
  std::string lightfield, out, deltas = "0.01,0.02,0.05,0.1,0.2", window = "hann";
};

int run_gap(const GapArgs& a) {
  const Lightfield lf = io::read_lightfield(a.lightfield);
  const auto deltas = parse_list(a.deltas, "--deltas");
  const PowerSpectrum4D spec = power_spectrum_4d(lf, a.window == "none" ? Window::None : Window::Hann);
  const auto rows = gap_table(spec, deltas);
  if (a.out.empty()) {
    write_gap_table(std::cout, rows);
  } else {
    std::ofstream os(a.out);
    if (!os) throw Error(ErrorKind::Io, "cannot write " + a.out);
    write_gap_table(os, rows);
  }
  return 0;
}

// --- export-bundle ----------------------------------------------------------

struct BundleArgs {
  std::string out, layers, lightfield, kernel, size, interp = "cubic";
  std::vector<std::string> views;
  double layer_spacing = 0, max_slope = 1, fmin = 6, fmax = 13, fraction = 0.05;
  int steps = 64, aperture = 0;
};

int run_export(const BundleArgs& a) {
  BundleContents c;
  c.max_slope = a.max_slope;
  if (!a.layers.empty()) {
    const VolumeGrid vol = io::read_volume(a.layers);
    c.layers = stack_from_volume(vol, a.layer_spacing > 0 ? a.layer_spacing : vol.spacing());
    for (const auto& v : a.views) {
      const auto [du, dv] = parse_pair(v, "--view");
      c.golden.push_back({du, dv});
    }
  } else if (!a.views.empty()) {
    throw UsageError("--view needs --layers");
  }
  if (!a.lightfield.empty()) {
    Lightfield lf = io::read_lightfield(a.lightfield);
    if (!a.kernel.empty()) {
      const Stencil4D stencil = kernel_or_usage(a.kernel);
      const FocusStackOptions opt = stack_options(lf, a.fmin, a.fmax, a.steps, a.aperture, a.size, a.interp);
      c.stack = kernel_focus_stack(lf, stencil, opt);
      c.depth = depth_from_stack(*c.stack);
      c.uncertainty = uncertainty_from_stack(*c.stack, a.fraction);
    }
    c.lightfield = std::move(lf);
  } else if (!a.kernel.empty()) {
    throw UsageError("--kernel needs --lightfield");
  }
  export_bundle(a.out, c);
  const BundleSummary s = load_bundle_manifest(a.out);
  std::cout << "bundle " << a.out << ": " << s.layer_count << " layers, " << s.golden_count
            << " golden frames, " << s.stack_frames << " stack frames"
            << (s.has_depth ? ", depth" : "") << (s.has_uncertainty ? ", uncertainty" : "")
            << (s.has_lightfield ? ", lightfield" : "") << '\n';
  return 0;
}

// --- serve ------------------------------------------------------------------

BundleServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const std::string& root, const std::string& host, int port) {
  const BundleSummary s = load_bundle_manifest(root);
  BundleServer server(root);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  if (port == 0) {
    // Block before the server thread exists so only sigwait sees the signal.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    const int bound = server.start(host, 0);
    std::cout << "serving " << root << " (" << s.layer_count << " layers) on http://" << host << ":"
              << bound << "/manifest" << std::endl;
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  } else {
    std::cout << "serving " << root << " (" << s.layer_count << " layers) on http://" << host << ":"
              << port << "/manifest" << std::endl;
    server.run(host, port);
  }
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"johnfield: lightfield tools built on the John transform"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Render a scene spec to a lightfield or volume");
  c_synth->add_option("--scene", synth.scene, "TOML scene spec")->required()->check(CLI::ExistingFile);
  c_synth->add_option("--out", synth.out, "Output .lfr or .vol")->required();
  c_synth->add_flag("--focal-stack", synth.focal_stack, "Blob scenes: write the dual transform (focal stack)");
  c_synth->add_option("--measure", synth.measure, "Line measure for blob lightfields")
      ->check(CLI::IsMember({"dm", "dz"}));

  InvertArgs inv;
  auto* c_inv = app.add_subcommand("invert-stack", "Invert a focal stack and render views");
  c_inv->add_option("--stack", inv.stack, "Focal stack volume (.vol, one layer per z slice)");
  c_inv->add_option("--layers", inv.layer_pngs, "Focal stack PNGs, front layer first");
  c_inv->add_option("--out", inv.out, "Output volume (.vol)")->required();
  c_inv->add_option("--spacing-xy", inv.spacing_xy, "World units per pixel for PNG input")
      ->check(CLI::PositiveNumber);
  c_inv->add_option("--layer-spacing", inv.layer_spacing, "World z between layers (default: spacing)");
  c_inv->add_option("--lo", inv.lo, "Levels low percentile")->check(CLI::Range(0.0, 100.0));
  c_inv->add_option("--hi", inv.hi, "Levels high percentile")->check(CLI::Range(0.0, 100.0));
  c_inv->add_option("--view", inv.views, "Render view slopes du,dv (repeatable)");
  c_inv->add_option("--view-dir", inv.view_dir, "Directory for rendered views");
  c_inv->add_option("--max-slope", inv.max_slope, "View cone half-width in slope units")
      ->check(CLI::PositiveNumber);

  DepthArgs dep;
  auto* c_depth = app.add_subcommand("depth", "Depth and uncertainty from a kernel-filtered focus stack");
  c_depth->add_option("--lightfield", dep.lightfield, "Input .lfr")->required()->check(CLI::ExistingFile);
  c_depth->add_option("--kernel", dep.kernel, "john|john9|asgN|asgT2:R1,R2");
  c_depth->add_option("--fmin", dep.fmin, "Smallest focus shift (pixels per microimage)");
  c_depth->add_option("--fmax", dep.fmax, "Largest focus shift");
  c_depth->add_option("--steps", dep.steps, "Number of focus steps");
  c_depth->add_option("--B", dep.aperture, "Blend aperture in microimages (0: largest valid)");
  c_depth->add_option("--size", dep.size, "Output size WxH (default: microimage size)");
  c_depth->add_option("--fraction", dep.fraction, "Trough threshold fraction")->check(CLI::Range(0.0, 1.0));
  c_depth->add_option("--out-dir", dep.out_dir, "Output directory");
  c_depth->add_option("--interp", dep.interp, "Tap interpolation")->check(CLI::IsMember({"cubic", "bilinear"}));
  c_depth->add_option("--region", dep.regions, "name:x0,y0,x1,y1 region to report (repeatable)");

  GapArgs gap;
  auto* c_gap = app.add_subcommand("gap", "Spectral concentration near k_y k_u = k_x k_v");
  c_gap->add_option("--lightfield", gap.lightfield, "Input .lfr")->required()->check(CLI::ExistingFile);
  c_gap->add_option("--deltas", gap.deltas, "Comma-separated band half-widths");
  c_gap->add_option("--window", gap.window, "hann|none")->check(CLI::IsMember({"hann", "none"}));
  c_gap->add_option("--out", gap.out, "Output table (default: stdout)");

  BundleArgs bun;
  auto* c_bundle = app.add_subcommand("export-bundle", "Write a viewer bundle directory");
  c_bundle->add_option("--out", bun.out, "Bundle directory")->required();
  c_bundle->add_option("--layers", bun.layers, "Processed focal stack volume (.vol)")->check(CLI::ExistingFile);
  c_bundle->add_option("--layer-spacing", bun.layer_spacing, "World z between layers (default: spacing)");
  c_bundle->add_option("--max-slope", bun.max_slope, "View cone half-width")->check(CLI::PositiveNumber);
  c_bundle->add_option("--view", bun.views, "Golden frame slopes du,dv (repeatable)");
  c_bundle->add_option("--lightfield", bun.lightfield, "Lightfield (.lfr)")->check(CLI::ExistingFile);
  c_bundle->add_option("--kernel", bun.kernel, "Kernel for the filtered stack and depth");
  c_bundle->add_option("--fmin", bun.fmin, "Smallest focus shift");
  c_bundle->add_option("--fmax", bun.fmax, "Largest focus shift");
  c_bundle->add_option("--steps", bun.steps, "Number of focus steps");
  c_bundle->add_option("--B", bun.aperture, "Blend aperture (0: largest valid)");
  c_bundle->add_option("--size", bun.size, "Stack frame size WxH");
  c_bundle->add_option("--interp", bun.interp, "Tap interpolation")->check(CLI::IsMember({"cubic", "bilinear"}));
  c_bundle->add_option("--fraction", bun.fraction, "Trough threshold fraction")->check(CLI::Range(0.0, 1.0));

  std::string serve_root, serve_host = "127.0.0.1";
  int serve_port = 8000;
  auto* c_serve = app.add_subcommand("serve", "Serve a bundle read-only over HTTP");
  c_serve->add_option("--root", serve_root, "Bundle directory")->required()->check(CLI::ExistingDirectory);
  c_serve->add_option("--host", serve_host, "Bind address");
  c_serve->add_option("--port", serve_port, "Port (0: pick a free one)")->check(CLI::Range(0, 65535));

  std::string kernel_name, kernel_out;
  auto* c_kernel = app.add_subcommand("kernel", "Print a stencil's tap list");
  c_kernel->add_option("name", kernel_name, "john|john9|asgN|asgT2:R1,R2")->required();
  c_kernel->add_option("--out", kernel_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_synth) return run_synth(synth);
    if (*c_inv) return run_invert(inv);
    if (*c_depth) return run_depth(dep);
    if (*c_gap) return run_gap(gap);
    if (*c_bundle) return run_export(bun);
    if (*c_serve) return run_serve(serve_root, serve_host, serve_port);
    if (*c_kernel) {
      const Stencil4D s = kernel_or_usage(kernel_name);
      if (kernel_out.empty()) {
        write_stencil(std::cout, s);
      } else {
        std::ofstream os(kernel_out);
        if (!os) throw Error(ErrorKind::Io, "cannot write " + kernel_out);
        write_stencil(os, s);
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
