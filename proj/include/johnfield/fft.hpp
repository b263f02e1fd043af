#pragma once

// Thin wrapper over FFTW for unnormalized n-dimensional complex transforms.

#include <complex>
#include <span>
#include <vector>

namespace johnfield::fft {

enum class Direction { Forward, Inverse };

/// In-place transform of a row-major array with the given dimensions
/// (slowest first). No normalization in either direction.
void transform(std::span<std::complex<double>> data, std::span<const int> dims,
               Direction dir);

/// Signed DFT frequency index of bin i on an axis of length n, in [-n/2, n/2).
inline int signed_bin(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

}  // namespace johnfield::fft
