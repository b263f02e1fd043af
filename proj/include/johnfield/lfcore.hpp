#pragma once

// Core value types for volumes, lightfields and images, plus the coordinate
// maps between the two-plane ray parameterization (x, y, u, v) and the
// ultrahyperbolic coordinates (xi1..xi4).

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace johnfield {

enum class ErrorKind {
  InvalidArgument,
  DegenerateDirection,
  EmptyScene,
  ZeroReference,
  DegenerateRadii,
  StencilTooLarge,
  OutOfViewCone,
  Format,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

/// Regular 3D grid of light-source density, indexed (z, y, x) with x fastest.
/// World position of voxel (ix, iy, iz) is origin + (ix, iy, iz) * spacing.
class VolumeGrid {
 public:
  VolumeGrid() = default;
  VolumeGrid(int nx, int ny, int nz, double spacing, Vec3 origin = {});
  VolumeGrid(int nx, int ny, int nz, double spacing, Vec3 origin, std::vector<double> data);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double spacing() const { return spacing_; }
  const Vec3& origin() const { return origin_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny_ + iy) * nx_ + ix;
  }
  double& operator()(int ix, int iy, int iz) { return data_[index(ix, iy, iz)]; }
  double operator()(int ix, int iy, int iz) const { return data_[index(ix, iy, iz)]; }

  Vec3 world(int ix, int iy, int iz) const;
  /// Trilinear interpolation at a world position; zero outside the grid.
  double sample(double x, double y, double z) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  /// Same geometry, new payload.
  VolumeGrid with_data(std::vector<double> data) const;

 private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  double spacing_ = 1.0;
  Vec3 origin_{};
  std::vector<double> data_;
};

struct LightfieldShape {
  int nu = 1, nv = 1, nx = 1, ny = 1;
  double pitch_uv = 1.0;
  double pitch_xy = 1.0;

  std::size_t samples() const {
    return static_cast<std::size_t>(nu) * nv * nx * ny;
  }
  // Microimage (nu-1)/2, (nv-1)/2 is the optical axis; pixel (nx-1)/2,
  // (ny-1)/2 is x = y = 0.
  double u_at(int iu) const { return (iu - 0.5 * (nu - 1)) * pitch_uv; }
  double v_at(int iv) const { return (iv - 0.5 * (nv - 1)) * pitch_uv; }
  double x_at(int ix) const { return (ix - 0.5 * (nx - 1)) * pitch_xy; }
  double y_at(int iy) const { return (iy - 0.5 * (ny - 1)) * pitch_xy; }

  void validate() const;
  bool operator==(const LightfieldShape&) const = default;
};

/// Radiance r(x, y, u, v) stored as a 2D array of microimages, indexed
/// (v, u, y, x) with x fastest.
class Lightfield {
 public:
  Lightfield() = default;
  explicit Lightfield(const LightfieldShape& shape);
  Lightfield(const LightfieldShape& shape, std::vector<double> data);

  const LightfieldShape& shape() const { return shape_; }
  int nu() const { return shape_.nu; }
  int nv() const { return shape_.nv; }
  int nx() const { return shape_.nx; }
  int ny() const { return shape_.ny; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int ix, int iy, int iu, int iv) const {
    return ((static_cast<std::size_t>(iv) * shape_.nu + iu) * shape_.ny + iy) * shape_.nx + ix;
  }
  double& operator()(int ix, int iy, int iu, int iv) { return data_[index(ix, iy, iu, iv)]; }
  double operator()(int ix, int iy, int iu, int iv) const { return data_[index(ix, iy, iu, iv)]; }

  std::span<const double> microimage(int iu, int iv) const;
  std::span<double> microimage(int iu, int iv);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

 private:
  LightfieldShape shape_{};
  std::vector<double> data_;
};

/// Single-channel linear image indexed (y, x).
struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image2D() = default;
  Image2D(int w, int h, double fill = 0.0);
  Image2D(int w, int h, std::vector<double> values);

  double& operator()(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double operator()(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  /// Bilinear sample at pixel coordinates; texels outside read as zero.
  double sample(double x, double y) const;
};

/// Bilinear interpolation of a row-major plane at (x, y) in pixel units.
/// Returns false when the 2x2 footprint leaves the plane (out is then 0).
bool bilinear(std::span<const double> plane, int width, int height, double x, double y,
              double& out);

/// Catmull-Rom cubic interpolation, separable. Along an axis with an integer
/// coordinate only that sample is used; otherwise the 4-sample footprint
/// must lie inside the plane. Returns false (out = 0) when it does not.
bool cubic(std::span<const double> plane, int width, int height, double x, double y,
           double& out);

struct XiPoint {
  double xi1 = 0, xi2 = 0, xi3 = 0, xi4 = 0;
  bool operator==(const XiPoint&) const = default;
};

struct RayTwoPlane {
  double x = 0, y = 0, u = 0, v = 0;
  bool operator==(const RayTwoPlane&) const = default;
};

/// Undirected line p + s w. Equality ignores the sign of w.
class RayPointDirection {
 public:
  /// Throws InvalidArgument unless |w| == 1 within 1e-12.
  RayPointDirection(Vec3 p, Vec3 w);
  /// Normalizes w; throws DegenerateDirection for a zero vector.
  static RayPointDirection from_unnormalized(Vec3 p, Vec3 w);

  const Vec3& p() const { return p_; }
  const Vec3& w() const { return w_; }
  bool operator==(const RayPointDirection& other) const;

 private:
  Vec3 p_, w_;
};

XiPoint xi_from_xyuv(const RayTwoPlane& ray);
RayTwoPlane xyuv_from_xi(const XiPoint& pt);

/// Two-plane parameters of the same line: slopes u = w1/w3, v = w2/w3 and the
/// intersection (x, y) with the z = 0 plane.
RayTwoPlane two_plane_from_point_direction(const RayPointDirection& ray);

}  // namespace johnfield
