#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>

namespace oracle {

/// Amplitude of the `freq_hz` component of a uniformly sampled series,
/// by direct single-bin DFT over the whole record.
inline double tone_amplitude(std::span<const double> x, double dt, double freq_hz) {
  std::complex<double> acc{0.0, 0.0};
  const double w = 2.0 * std::numbers::pi * freq_hz * dt;
  for (std::size_t n = 0; n < x.size(); ++n)
    acc += x[n] * std::complex<double>(std::cos(w * n), -std::sin(w * n));
  return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

}  // namespace oracle
