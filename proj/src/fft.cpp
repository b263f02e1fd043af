#include "johnfield/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "johnfield/lfcore.hpp"

namespace johnfield::fft {
namespace {
// The FFTW planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void transform(std::span<std::complex<double>> data, std::span<const int> dims,
               Direction dir) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d <= 0) throw Error(ErrorKind::InvalidArgument, "fft: non-positive dimension");
    total *= static_cast<std::size_t>(d);
  }
  if (total != data.size()) throw Error(ErrorKind::InvalidArgument, "fft: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                         FFTW_ESTIMATE);
  }
  if (!plan) throw Error(ErrorKind::InvalidArgument, "fft: planning failed");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace johnfield::fft
