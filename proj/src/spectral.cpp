#include "johnfield/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>

#include "johnfield/fft.hpp"

namespace johnfield {

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double s = std::sin(std::numbers::pi * (i + 0.5) / n);
    w[static_cast<std::size_t>(i)] = s * s;
  }
  return w;
}

double PowerSpectrum4D::non_dc_total() const {
  return std::accumulate(power.begin() + 1, power.end(), 0.0);
}

double PowerSpectrum4D::k(int axis, int i) const {
  const int n = dims[static_cast<std::size_t>(axis)];
  return 2.0 * std::numbers::pi * fft::signed_bin(i, n) / n;
}

PowerSpectrum4D power_spectrum_4d(const Lightfield& lf, Window window) {
  const int nv = lf.nv(), nu = lf.nu(), ny = lf.ny(), nx = lf.nx();
  if (nv < 4 || nu < 4 || ny < 4 || nx < 4)
    throw Error(ErrorKind::InvalidArgument, "power_spectrum_4d: every dimension must be >= 4");
  const auto data = lf.data();
  const double n = static_cast<double>(data.size());
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / n;

  std::vector<double> wv(nv, 1.0), wu(nu, 1.0), wy(ny, 1.0), wx(nx, 1.0);
  if (window == Window::Hann) {
    wv = hann_window(nv);
    wu = hann_window(nu);
    wy = hann_window(ny);
    wx = hann_window(nx);
  }
  std::vector<std::complex<double>> buf(data.size());
  for (int iv = 0; iv < nv; ++iv)
    for (int iu = 0; iu < nu; ++iu)
      for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
          const std::size_t i = lf.index(ix, iy, iu, iv);
          buf[i] = (data[i] - mean) * wv[iv] * wu[iu] * wy[iy] * wx[ix];
        }
  const int dims[4] = {nv, nu, ny, nx};
  fft::transform(buf, dims, fft::Direction::Forward);

  PowerSpectrum4D s;
  s.dims = {nv, nu, ny, nx};
  s.dc_energy = mean * mean * n;
  s.power.resize(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) s.power[i] = std::norm(buf[i]) / n;
  return s;
}

namespace {

template <class Fn>
void for_each_bin(const std::array<int, 4>& d, Fn&& fn) {
  std::size_t i = 0;
  for (int a = 0; a < d[0]; ++a)
    for (int b = 0; b < d[1]; ++b)
      for (int c = 0; c < d[2]; ++c)
        for (int e = 0; e < d[3]; ++e, ++i) fn(i, a, b, c, e);
}

struct BandTest {
  std::array<std::vector<double>, 4> k;
  double limit;

  BandTest(const std::array<int, 4>& dims, double delta) {
    if (!(delta > 0)) throw Error(ErrorKind::InvalidArgument, "gap: delta must be > 0");
    for (int a = 0; a < 4; ++a) {
      const int n = dims[static_cast<std::size_t>(a)];
      for (int i = 0; i < n; ++i)
        k[static_cast<std::size_t>(a)].push_back(2.0 * std::numbers::pi * fft::signed_bin(i, n) / n);
    }
    limit = delta * std::numbers::pi * std::numbers::pi;
  }
  // Axis order is (v, u, y, x).
  bool inside(int iv, int iu, int iy, int ix) const {
    return std::abs(k[2][iy] * k[1][iu] - k[3][ix] * k[0][iv]) <= limit;
  }
};

}  // namespace

double gap_concentration(const PowerSpectrum4D& s, double delta) {
  const BandTest band(s.dims, delta);
  double inside = 0.0, total = 0.0;
  for_each_bin(s.dims, [&](std::size_t i, int iv, int iu, int iy, int ix) {
    if (i == 0) return;
    total += s.power[i];
    if (band.inside(iv, iu, iy, ix)) inside += s.power[i];
  });
  return total > 0 ? inside / total : 0.0;
}

double band_measure(const std::array<int, 4>& dims, double delta) {
  const BandTest band(dims, delta);
  std::size_t inside = 0, total = 0;
  for_each_bin(dims, [&](std::size_t i, int iv, int iu, int iy, int ix) {
    if (i == 0) return;
    ++total;
    if (band.inside(iv, iu, iy, ix)) ++inside;
  });
  return total ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
}

std::vector<GapRow> gap_table(const PowerSpectrum4D& spectrum, const std::vector<double>& deltas) {
  std::vector<GapRow> rows;
  for (double d : deltas) rows.push_back({d, gap_concentration(spectrum, d), band_measure(spectrum.dims, d)});
  return rows;
}

void write_gap_table(std::ostream& os, const std::vector<GapRow>& rows) {
  os << "# delta fraction baseline\n";
  os.precision(6);
  for (const auto& r : rows) os << r.delta << ' ' << r.fraction << ' ' << r.baseline << '\n';
}

Lightfield phase_scramble(const Lightfield& lf, std::uint64_t seed) {
  const int nv = lf.nv(), nu = lf.nu(), ny = lf.ny(), nx = lf.nx();
  const std::array<int, 4> d{nv, nu, ny, nx};
  std::vector<std::complex<double>> buf(lf.data().begin(), lf.data().end());
  const int dims[4] = {nv, nu, ny, nx};
  fft::transform(buf, dims, fft::Direction::Forward);

  auto mirror = [&](int a, int b, int c, int e) {
    const int ma = (d[0] - a) % d[0], mb = (d[1] - b) % d[1];
    const int mc = (d[2] - c) % d[2], me = (d[3] - e) % d[3];
    return ((static_cast<std::size_t>(ma) * d[1] + mb) * d[2] + mc) * d[3] + me;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  for_each_bin(d, [&](std::size_t i, int a, int b, int c, int e) {
    const std::size_t j = mirror(a, b, c, e);
    if (j < i) return;  // set together with its partner
    if (j == i) {
      // Self-conjugate bins must stay real: random sign, except DC.
      if (i != 0 && (rng() & 1u)) buf[i] = -buf[i];
      return;
    }
    const std::complex<double> rot = std::polar(1.0, phase(rng));
    buf[i] *= rot;
    buf[j] *= std::conj(rot);
  });
  fft::transform(buf, dims, fft::Direction::Inverse);
  std::vector<double> out(buf.size());
  const double norm = 1.0 / static_cast<double>(buf.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real() * norm;
  return Lightfield(lf.shape(), std::move(out));
}

}  // namespace johnfield
