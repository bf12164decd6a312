#include "shakebot/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shakebot/errors.hpp"

namespace shakebot::motion {

namespace {

std::size_t pad_length(const Section& s) { return s.first_order ? 6 : 9; }

// Steady-state DF2T state for a unit step input.
std::pair<double, double> step_state(const Section& s) {
  const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
  const double z2 = s.b2 - s.a2 * gain;
  const double z1 = s.b1 - s.a1 * gain + z2;
  return {z1, z2};
}

void run_section(const Section& s, std::vector<double>& x) {
  auto [zi1, zi2] = step_state(s);
  double z1 = zi1 * x.front();
  double z2 = zi2 * x.front();
  for (double& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

std::vector<double> filtfilt_section(const Section& s, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t pad = pad_length(s);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

  run_section(s, ext);
  std::reverse(ext.begin(), ext.end());
  run_section(s, ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace

std::vector<Section> butterworth_sections(const FilterSpec& spec, double sample_rate_hz) {
  if (spec.order < 1) throw DomainError("filter order must be >= 1");
  const double nyquist = 0.5 * sample_rate_hz;
  if (!(spec.cutoff_hz > 0.0) || spec.cutoff_hz >= nyquist)
    throw DomainError("filter cutoff " + std::to_string(spec.cutoff_hz) +
                      " Hz must lie in (0, Nyquist=" + std::to_string(nyquist) + " Hz)");

  const double k = std::tan(std::numbers::pi * spec.cutoff_hz / sample_rate_hz);
  const bool low = spec.kind == FilterKind::LowPass;
  std::vector<Section> sections;

  for (int i = 0; i < spec.order / 2; ++i) {
    const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * spec.order);
    const double q = 1.0 / (2.0 * std::sin(theta));
    const double norm = 1.0 / (1.0 + k / q + k * k);
    Section s;
    if (low) {
      s.b0 = k * k * norm;
      s.b1 = 2.0 * s.b0;
      s.b2 = s.b0;
    } else {
      s.b0 = norm;
      s.b1 = -2.0 * norm;
      s.b2 = norm;
    }
    s.a1 = 2.0 * (k * k - 1.0) * norm;
    s.a2 = (1.0 - k / q + k * k) * norm;
    sections.push_back(s);
  }
  if (spec.order % 2 == 1) {
    Section s;
    s.first_order = true;
    if (low) {
      s.b0 = k / (1.0 + k);
      s.b1 = s.b0;
    } else {
      s.b0 = 1.0 / (1.0 + k);
      s.b1 = -s.b0;
    }
    s.a1 = (k - 1.0) / (k + 1.0);
    sections.push_back(s);
  }
  return sections;
}

std::size_t filter_warm_up_length(const FilterSpec& spec) {
  return (spec.order >= 2 ? 9u : 6u) + 1u;
}

std::vector<double> apply_filter(std::span<const double> series, double dt, const FilterSpec& spec) {
  if (!(dt > 0.0)) throw DomainError("sample interval must be positive");
  const auto sections = butterworth_sections(spec, 1.0 / dt);
  if (series.size() < filter_warm_up_length(spec))
    throw DomainError("series of " + std::to_string(series.size()) +
                      " samples is shorter than the filter warm-up length " +
                      std::to_string(filter_warm_up_length(spec)));

  std::vector<double> out(series.begin(), series.end());
  for (const auto& s : sections) out = filtfilt_section(s, out);
  return out;
}

}  // namespace shakebot::motion
