#include "johnfield/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "johnfield/parallel.hpp"

namespace johnfield {

Stencil2D laplacian2d(LaplacianVariant variant) {
  Stencil2D s;
  s.half = 1;
  if (variant == LaplacianVariant::FivePoint) {
    s.weights = {0, 1, 0, 1, -4, 1, 0, 1, 0};
    s.scale = 1.0;
  } else {
    s.weights = {1, 4, 1, 4, -20, 4, 1, 4, 1};
    s.scale = 1.0 / 6.0;
  }
  return s;
}

double Stencil4D::weight_sum() const {
  double acc = 0;
  for (const auto& t : taps) acc += t.weight;
  return acc;
}

std::array<int, 4> Stencil4D::reach() const {
  std::array<int, 4> r{};
  for (const auto& t : taps)
    for (int a = 0; a < 4; ++a) r[a] = std::max(r[a], std::abs(t.offset[a]));
  return r;
}

Stencil4D canonicalize(Stencil4D s) {
  std::map<std::array<int, 4>, double> merged;
  for (const auto& t : s.taps) merged[t.offset] += t.weight;
  s.taps.clear();
  for (const auto& [offset, weight] : merged)
    if (weight != 0.0) s.taps.push_back({offset, weight});
  return s;
}

Stencil4D to_lightfield_frame(const Stencil4D& xi) {
  if (xi.frame != StencilFrame::Xi)
    throw Error(ErrorKind::InvalidArgument, "to_lightfield_frame: stencil is not in xi frame");
  Stencil4D out;
  out.frame = StencilFrame::Lightfield;
  out.provenance = xi.provenance;
  // (d_y d_u - d_x d_v) = (Delta_14 - Delta_23) / 4
  out.scale = xi.scale / 4.0;
  for (const auto& t : xi.taps) {
    const auto& d = t.offset;
    out.taps.push_back({{d[2] - d[3], d[0] - d[1], d[0] + d[1], d[2] + d[3]}, t.weight});
  }
  return canonicalize(std::move(out));
}

Stencil4D ultrahyperbolic_stencil(LaplacianVariant variant) {
  const Stencil2D lap = laplacian2d(variant);
  Stencil4D s;
  s.frame = StencilFrame::Xi;
  s.scale = lap.scale;
  s.provenance = variant == LaplacianVariant::FivePoint ? "ultrahyperbolic 5-point"
                                                        : "ultrahyperbolic 9-point";
  for (int a = -lap.half; a <= lap.half; ++a)
    for (int b = -lap.half; b <= lap.half; ++b) {
      const double w = lap.at(a, b);
      if (w == 0.0) continue;
      s.taps.push_back({{a, 0, 0, b}, w});    // (xi1, xi4) plane
      s.taps.push_back({{0, a, b, 0}, -w});   // (xi2, xi3) plane
    }
  return canonicalize(std::move(s));
}

Stencil4D john_stencil(LaplacianVariant variant) {
  Stencil4D s = to_lightfield_frame(ultrahyperbolic_stencil(variant));
  s.provenance = variant == LaplacianVariant::FivePoint ? "john 5-point" : "john 9-point";
  return s;
}

namespace {
constexpr std::array<std::array<int, 2>, 4> kCircle4{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
}

Stencil4D asg_t1_stencil(int radius) {
  if (radius < 1) throw Error(ErrorKind::InvalidArgument, "asg_t1_stencil: radius must be >= 1");
  Stencil4D xi;
  xi.frame = StencilFrame::Xi;
  // Four-point circle means of a quadratic differ by R^2 (Delta_14 - Delta_23) / 4.
  xi.scale = 1.0 / (static_cast<double>(radius) * radius);
  for (const auto& [c, s] : kCircle4) {
    xi.taps.push_back({{radius * c, 0, 0, radius * s}, 1.0});
    xi.taps.push_back({{0, radius * c, radius * s, 0}, -1.0});
  }
  Stencil4D out = to_lightfield_frame(canonicalize(std::move(xi)));
  out.provenance = "asgeirsson T1 R=" + std::to_string(radius);
  return out;
}

Stencil4D asg_t2_stencil(int r1, int r2) {
  if (r1 < 1 || r2 < 1) throw Error(ErrorKind::InvalidArgument, "asg_t2_stencil: radii must be >= 1");
  if (r1 == r2) throw Error(ErrorKind::DegenerateRadii, "asg_t2_stencil: equal radii cancel");
  Stencil4D xi;
  xi.frame = StencilFrame::Xi;
  // 16 (mean_+ - mean_-) of a quadratic is 4 (R1^2 - R2^2)(Delta_14 - Delta_23).
  xi.scale = 1.0 / (4.0 * (static_cast<double>(r1) * r1 - static_cast<double>(r2) * r2));
  for (const auto& [c1, s1] : kCircle4)
    for (const auto& [c2, s2] : kCircle4) {
      xi.taps.push_back({{r1 * c1, r2 * c2, r2 * s2, r1 * s1}, 1.0});
      xi.taps.push_back({{r2 * c1, r1 * c2, r1 * s2, r2 * s1}, -1.0});
    }
  Stencil4D out = to_lightfield_frame(canonicalize(std::move(xi)));
  out.provenance = "asgeirsson T2 R1=" + std::to_string(r1) + " R2=" + std::to_string(r2);
  return out;
}

double stencil_sum(const Stencil4D& s, const std::function<double(const RayTwoPlane&)>& field,
                   const RayTwoPlane& at, double h_xy, double h_uv) {
  if (s.frame != StencilFrame::Lightfield)
    throw Error(ErrorKind::InvalidArgument, "stencil_sum: stencil is not in lightfield frame");
  double acc = 0.0;
  for (const auto& t : s.taps) {
    const auto& d = t.offset;
    acc += t.weight * field({at.x + d[0] * h_xy, at.y + d[1] * h_xy, at.u + d[2] * h_uv,
                             at.v + d[3] * h_uv});
  }
  return acc;
}

double stencil_sum_xi(const Stencil4D& s, const std::function<double(const XiPoint&)>& field,
                      const XiPoint& at, double h) {
  if (s.frame != StencilFrame::Xi)
    throw Error(ErrorKind::InvalidArgument, "stencil_sum_xi: stencil is not in xi frame");
  double acc = 0.0;
  for (const auto& t : s.taps) {
    const auto& d = t.offset;
    acc += t.weight *
           field({at.xi1 + d[0] * h, at.xi2 + d[1] * h, at.xi3 + d[2] * h, at.xi4 + d[3] * h});
  }
  return acc;
}

FilteredLightfield apply_stencil_region(const Lightfield& lf, const Stencil4D& s,
                                        double focus_shift, int u0, int u1, int v0, int v1,
                                        TapInterpolation interp) {
  if (s.frame != StencilFrame::Lightfield)
    throw Error(ErrorKind::InvalidArgument, "apply_stencil: stencil is not in lightfield frame");
  if (!(focus_shift >= 0)) throw Error(ErrorKind::InvalidArgument, "apply_stencil: F must be >= 0");
  const auto reach = s.reach();
  const int nx = lf.nx(), ny = lf.ny(), nu = lf.nu(), nv = lf.nv();
  if (2 * reach[2] + 1 > nu || 2 * reach[3] + 1 > nv || 2 * reach[0] + 1 > nx ||
      2 * reach[1] + 1 > ny)
    throw Error(ErrorKind::StencilTooLarge, "stencil footprint exceeds the lightfield grid");

  FilteredLightfield out{Lightfield(lf.shape()), std::vector<unsigned char>(lf.size(), 0),
                         reach[2], reach[3]};
  u0 = std::max(u0, reach[2]);
  u1 = std::min(u1, nu - reach[2]);
  v0 = std::max(v0, reach[3]);
  v1 = std::min(v1, nv - reach[3]);
  if (u0 >= u1 || v0 >= v1) return out;

  const auto read = interp == TapInterpolation::Cubic ? &cubic : &bilinear;
  const int mu = u1 - u0;
  parallel_for(static_cast<std::size_t>(mu) * (v1 - v0), [&](std::size_t m) {
    const int iu = u0 + static_cast<int>(m % mu), iv = v0 + static_cast<int>(m / mu);
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        double acc = 0.0;
        bool ok = true;
        for (const auto& t : s.taps) {
          const auto& d = t.offset;
          double value;
          if (!read(lf.microimage(iu + d[2], iv + d[3]), nx, ny,
                        ix + d[0] + focus_shift * d[2], iy + d[1] + focus_shift * d[3], value)) {
            ok = false;
            break;
          }
          acc += t.weight * value;
        }
        const std::size_t i = lf.index(ix, iy, iu, iv);
        out.values.data()[i] = ok ? acc : 0.0;
        out.valid[i] = ok ? 1 : 0;
      }
  });
  return out;
}

FilteredLightfield apply_stencil(const Lightfield& lf, const Stencil4D& s, double focus_shift,
                                 TapInterpolation interp) {
  return apply_stencil_region(lf, s, focus_shift, 0, lf.nu(), 0, lf.nv(), interp);
}

void write_stencil(std::ostream& os, const Stencil4D& s) {
  os.precision(17);
  os << "# stencil\n";
  os << "# frame " << (s.frame == StencilFrame::Xi ? "xi" : "lightfield") << '\n';
  os << "# scale " << s.scale << '\n';
  os << "# provenance " << s.provenance << '\n';
  for (const auto& t : s.taps)
    os << t.offset[0] << ' ' << t.offset[1] << ' ' << t.offset[2] << ' ' << t.offset[3] << ' '
       << t.weight << '\n';
}

Stencil4D read_stencil(std::istream& is) {
  Stencil4D s;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "scale") {
        hs >> s.scale;
      } else if (key == "frame") {
        std::string f;
        hs >> f;
        s.frame = f == "xi" ? StencilFrame::Xi : StencilFrame::Lightfield;
      } else if (key == "provenance") {
        std::getline(hs >> std::ws, s.provenance);
      }
      continue;
    }
    std::istringstream ls(line);
    Tap t;
    if (!(ls >> t.offset[0] >> t.offset[1] >> t.offset[2] >> t.offset[3] >> t.weight))
      throw Error(ErrorKind::Format, "stencil line " + std::to_string(lineno) +
                                         ": expected 'dx dy du dv weight'");
    s.taps.push_back(t);
  }
  const std::size_t raw = s.taps.size();
  s = canonicalize(std::move(s));
  if (s.taps.size() != raw)
    throw Error(ErrorKind::Format, "stencil has duplicate offsets or zero weights");
  return s;
}

Stencil4D stencil_by_name(const std::string& name) {
  auto parse_int = [&](std::string_view text) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw Error(ErrorKind::InvalidArgument, "unknown kernel '" + name + "'");
    return value;
  };
  if (name == "john") return john_stencil(LaplacianVariant::FivePoint);
  if (name == "john9") return john_stencil(LaplacianVariant::NinePoint);
  if (name.rfind("asgT2:", 0) == 0) {
    const std::string_view args = std::string_view(name).substr(6);
    const auto comma = args.find(',');
    if (comma == std::string_view::npos)
      throw Error(ErrorKind::InvalidArgument, "asgT2 expects R1,R2");
    return asg_t2_stencil(parse_int(args.substr(0, comma)), parse_int(args.substr(comma + 1)));
  }
  if (name.rfind("asg", 0) == 0 && name.size() > 3)
    return asg_t1_stencil(parse_int(std::string_view(name).substr(3)));
  throw Error(ErrorKind::InvalidArgument, "unknown kernel '" + name + "'");
}

}  // namespace johnfield
