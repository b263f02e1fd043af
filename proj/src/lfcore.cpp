#include "johnfield/lfcore.hpp"

#include <cmath>
#include <utility>

namespace johnfield {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::EmptyScene: return "EmptyScene";
    case ErrorKind::ZeroReference: return "ZeroReference";
    case ErrorKind::DegenerateRadii: return "DegenerateRadii";
    case ErrorKind::StencilTooLarge: return "StencilTooLarge";
    case ErrorKind::OutOfViewCone: return "OutOfViewCone";
    case ErrorKind::Format: return "Format";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

// --- VolumeGrid -------------------------------------------------------------

VolumeGrid::VolumeGrid(int nx, int ny, int nz, double spacing, Vec3 origin)
    : VolumeGrid(nx, ny, nz, spacing, origin,
                 std::vector<double>(static_cast<std::size_t>(nx > 0 ? nx : 0) *
                                     (ny > 0 ? ny : 0) * (nz > 0 ? nz : 0))) {}

VolumeGrid::VolumeGrid(int nx, int ny, int nz, double spacing, Vec3 origin,
                       std::vector<double> data)
    : nx_(nx), ny_(ny), nz_(nz), spacing_(spacing), origin_(origin), data_(std::move(data)) {
  if (nx <= 0 || ny <= 0 || nz <= 0)
    throw Error(ErrorKind::InvalidArgument, "VolumeGrid: dimensions must be positive");
  if (!(spacing > 0))
    throw Error(ErrorKind::InvalidArgument, "VolumeGrid: spacing must be > 0");
  if (data_.size() != static_cast<std::size_t>(nx) * ny * nz)
    throw Error(ErrorKind::InvalidArgument, "VolumeGrid: data length != nx*ny*nz");
}

Vec3 VolumeGrid::world(int ix, int iy, int iz) const {
  return {origin_.x + ix * spacing_, origin_.y + iy * spacing_, origin_.z + iz * spacing_};
}

double VolumeGrid::sample(double x, double y, double z) const {
  const double fx = (x - origin_.x) / spacing_;
  const double fy = (y - origin_.y) / spacing_;
  const double fz = (z - origin_.z) / spacing_;
  const double x0f = std::floor(fx), y0f = std::floor(fy), z0f = std::floor(fz);
  if (x0f < -1 || y0f < -1 || z0f < -1 || x0f >= nx_ || y0f >= ny_ || z0f >= nz_) return 0.0;
  const int x0 = static_cast<int>(x0f), y0 = static_cast<int>(y0f), z0 = static_cast<int>(z0f);
  const double tx = fx - x0f, ty = fy - y0f, tz = fz - z0f;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const int iz = z0 + dz;
    if (iz < 0 || iz >= nz_) continue;
    const double wz = dz ? tz : 1.0 - tz;
    for (int dy = 0; dy < 2; ++dy) {
      const int iy = y0 + dy;
      if (iy < 0 || iy >= ny_) continue;
      const double wy = dy ? ty : 1.0 - ty;
      for (int dx = 0; dx < 2; ++dx) {
        const int ix = x0 + dx;
        if (ix < 0 || ix >= nx_) continue;
        const double wx = dx ? tx : 1.0 - tx;
        acc += wz * wy * wx * data_[index(ix, iy, iz)];
      }
    }
  }
  return acc;
}

VolumeGrid VolumeGrid::with_data(std::vector<double> data) const {
  return VolumeGrid(nx_, ny_, nz_, spacing_, origin_, std::move(data));
}

// --- Lightfield -------------------------------------------------------------

void LightfieldShape::validate() const {
  if (nu <= 0 || nv <= 0 || nx <= 0 || ny <= 0)
    throw Error(ErrorKind::InvalidArgument, "Lightfield: dimensions must be positive");
  if (!(pitch_uv > 0) || !(pitch_xy > 0))
    throw Error(ErrorKind::InvalidArgument, "Lightfield: pitches must be > 0");
}

Lightfield::Lightfield(const LightfieldShape& shape) : shape_(shape) {
  shape_.validate();
  data_.assign(shape_.samples(), 0.0);
}

Lightfield::Lightfield(const LightfieldShape& shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  shape_.validate();
  if (data_.size() != shape_.samples())
    throw Error(ErrorKind::InvalidArgument, "Lightfield: data length != nu*nv*nx*ny");
}

std::span<const double> Lightfield::microimage(int iu, int iv) const {
  const std::size_t n = static_cast<std::size_t>(shape_.nx) * shape_.ny;
  return std::span<const double>(data_).subspan(index(0, 0, iu, iv), n);
}

std::span<double> Lightfield::microimage(int iu, int iv) {
  const std::size_t n = static_cast<std::size_t>(shape_.nx) * shape_.ny;
  return std::span<double>(data_).subspan(index(0, 0, iu, iv), n);
}

// --- Image2D ----------------------------------------------------------------

Image2D::Image2D(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw Error(ErrorKind::InvalidArgument, "Image2D: empty size");
  data.assign(static_cast<std::size_t>(w) * h, fill);
}

Image2D::Image2D(int w, int h, std::vector<double> values)
    : width(w), height(h), data(std::move(values)) {
  if (w <= 0 || h <= 0 || data.size() != static_cast<std::size_t>(w) * h)
    throw Error(ErrorKind::InvalidArgument, "Image2D: data length != width*height");
}

double Image2D::sample(double x, double y) const {
  // Zero-padded: texels outside the image read as 0 and still blend.
  const double x0f = std::floor(x), y0f = std::floor(y);
  if (!(x0f >= -1) || !(y0f >= -1) || x0f > width - 1 || y0f > height - 1) return 0.0;
  const int x0 = static_cast<int>(x0f), y0 = static_cast<int>(y0f);
  const double tx = x - x0f, ty = y - y0f;
  auto at = [&](int px, int py) {
    return px < 0 || py < 0 || px >= width || py >= height ? 0.0 : (*this)(px, py);
  };
  return (1 - ty) * ((1 - tx) * at(x0, y0) + tx * at(x0 + 1, y0)) +
         ty * ((1 - tx) * at(x0, y0 + 1) + tx * at(x0 + 1, y0 + 1));
}

bool bilinear(std::span<const double> plane, int width, int height, double x, double y,
              double& out) {
  out = 0.0;
  const double x0f = std::floor(x), y0f = std::floor(y);
  if (!(x0f >= 0) || !(y0f >= 0) || x0f > width - 1 || y0f > height - 1) return false;
  const int x0 = static_cast<int>(x0f), y0 = static_cast<int>(y0f);
  const double tx = x - x0f, ty = y - y0f;
  // Exact integer positions on the far edge need no right/bottom neighbor.
  const int x1 = tx > 0 ? x0 + 1 : x0;
  const int y1 = ty > 0 ? y0 + 1 : y0;
  if (x1 >= width || y1 >= height) return false;
  const std::size_t w = static_cast<std::size_t>(width);
  const double a = plane[y0 * w + x0], b = plane[y0 * w + x1];
  const double c = plane[y1 * w + x0], d = plane[y1 * w + x1];
  out = (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
  return true;
}

namespace {

// Catmull-Rom weights for fractional offset t in [0, 1): samples at -1, 0, 1, 2.
void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2 * t2 - t);
  w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
  w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

// First index and weights of the footprint along one axis.
bool cubic_axis(double p, int n, int& first, int& count, double w[4]) {
  const double p0 = std::floor(p);
  if (!(p0 >= 0) || p0 > n - 1) return false;
  const double t = p - p0;
  if (t == 0) {
    first = static_cast<int>(p0);
    count = 1;
    w[0] = 1.0;
    return true;
  }
  first = static_cast<int>(p0) - 1;
  count = 4;
  if (first < 0 || first + 3 >= n) return false;
  catmull_rom(t, w);
  return true;
}

}  // namespace

bool cubic(std::span<const double> plane, int width, int height, double x, double y,
           double& out) {
  out = 0.0;
  int fx, nx, fy, ny;
  double wx[4], wy[4];
  if (!cubic_axis(x, width, fx, nx, wx) || !cubic_axis(y, height, fy, ny, wy)) return false;
  const std::size_t w = static_cast<std::size_t>(width);
  double acc = 0.0;
  for (int j = 0; j < ny; ++j) {
    const double* row = plane.data() + (fy + j) * w + fx;
    double r = 0.0;
    for (int i = 0; i < nx; ++i) r += wx[i] * row[i];
    acc += wy[j] * r;
  }
  out = acc;
  return true;
}

// --- Rays and coordinates ---------------------------------------------------

RayPointDirection::RayPointDirection(Vec3 p, Vec3 w) : p_(p), w_(w) {
  const double n = std::sqrt(w.x * w.x + w.y * w.y + w.z * w.z);
  if (!(std::abs(n - 1.0) <= 1e-12))
    throw Error(ErrorKind::InvalidArgument, "RayPointDirection: |w| must be 1");
}

RayPointDirection RayPointDirection::from_unnormalized(Vec3 p, Vec3 w) {
  const double n = std::sqrt(w.x * w.x + w.y * w.y + w.z * w.z);
  if (!(n > 0)) throw Error(ErrorKind::DegenerateDirection, "zero direction vector");
  return RayPointDirection(p, {w.x / n, w.y / n, w.z / n});
}

bool RayPointDirection::operator==(const RayPointDirection& o) const {
  const bool same_p = p_.x == o.p_.x && p_.y == o.p_.y && p_.z == o.p_.z;
  const bool same_w = w_.x == o.w_.x && w_.y == o.w_.y && w_.z == o.w_.z;
  const bool flip_w = w_.x == -o.w_.x && w_.y == -o.w_.y && w_.z == -o.w_.z;
  return same_p && (same_w || flip_w);
}

XiPoint xi_from_xyuv(const RayTwoPlane& r) {
  return {0.5 * (r.u + r.y), 0.5 * (r.u - r.y), 0.5 * (r.v + r.x), 0.5 * (r.v - r.x)};
}

RayTwoPlane xyuv_from_xi(const XiPoint& p) {
  return {p.xi3 - p.xi4, p.xi1 - p.xi2, p.xi1 + p.xi2, p.xi3 + p.xi4};
}

RayTwoPlane two_plane_from_point_direction(const RayPointDirection& ray) {
  const Vec3& p = ray.p();
  const Vec3& w = ray.w();
  if (std::abs(w.z) < 1e-12)
    throw Error(ErrorKind::DegenerateDirection,
                "line parallel to the reference plane has no two-plane form");
  const double u = w.x / w.z;
  const double v = w.y / w.z;
  return {p.x - p.z * u, p.y - p.z * v, u, v};
}

}  // namespace johnfield
