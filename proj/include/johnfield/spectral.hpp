#pragma once

// 4D power spectra of lightfields and the concentration of spectral energy
// near the manifold k_y k_u = k_x k_v.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "johnfield/lfcore.hpp"

namespace johnfield {

enum class Window { Hann, None };

/// |FFT|^2 / N of the mean-removed, windowed lightfield, indexed like the
/// lightfield (v, u, y, x). The removed mean is reported as `dc_energy`
/// (mean^2 N) and the DC bin of `power` is excluded from all ratios.
struct PowerSpectrum4D {
  std::array<int, 4> dims{};  // nv, nu, ny, nx
  std::vector<double> power;
  double dc_energy = 0.0;

  double non_dc_total() const;
  /// Normalized angular frequency of bin i on axis a, in [-pi, pi).
  double k(int axis, int i) const;
};

/// Separable Hann weights sin^2(pi (n + 1/2) / N), nonzero at every sample.
std::vector<double> hann_window(int n);

PowerSpectrum4D power_spectrum_4d(const Lightfield& lf, Window window = Window::Hann);

/// Fraction of non-DC energy in bins with |k_y k_u - k_x k_v| <= delta pi^2.
double gap_concentration(const PowerSpectrum4D& spectrum, double delta);

/// Fraction of non-DC bins inside the same band: the concentration of a
/// spectrally flat field.
double band_measure(const std::array<int, 4>& dims, double delta);

struct GapRow {
  double delta = 0;
  double fraction = 0;
  double baseline = 0;
};
std::vector<GapRow> gap_table(const PowerSpectrum4D& spectrum, const std::vector<double>& deltas);
void write_gap_table(std::ostream& os, const std::vector<GapRow>& rows);

/// Same magnitude spectrum with uniformly random, Hermitian-symmetric phases.
/// Deterministic for a given seed.
Lightfield phase_scramble(const Lightfield& lf, std::uint64_t seed);

}  // namespace johnfield
