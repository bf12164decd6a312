#include "shakebot/ground_motion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shakebot/errors.hpp"

namespace shakebot::motion {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_sampling(const PulseParams& params, double rate) {
  if (!(rate >= 2.0 * params.frequency))
    throw DomainError("sample rate " + std::to_string(rate) + " Hz is below 2f = " +
                      std::to_string(2.0 * params.frequency) + " Hz");
}

}  // namespace

double PulseParams::pgv() const { return kTwoPi * amplitude * frequency; }

double PulseParams::displacement(double t) const {
  return amplitude - amplitude * std::cos(kTwoPi * frequency * t);
}

double PulseParams::velocity(double t) const {
  return kTwoPi * amplitude * frequency * std::sin(kTwoPi * frequency * t);
}

double PulseParams::acceleration(double t) const {
  const double w = kTwoPi * frequency;
  return w * w * amplitude * std::cos(w * t);
}

PulseParams pulse_from_pga_kappa(double pga, double kappa, double gravity) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be positive");
  if (!(pga >= 0.0) || !std::isfinite(pga)) throw DomainError("pga must be non-negative");
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
  PulseParams p;
  p.pga = pga;
  p.kappa = kappa;
  p.gravity = gravity;
  p.frequency = 1.0 / (kTwoPi * kappa);
  const double w = kTwoPi * p.frequency;
  p.amplitude = pga / (w * w);
  return p;
}

PulseParams pulse_from_amplitude_frequency(double amplitude, double frequency, double gravity) {
  if (!(frequency > 0.0)) throw DomainError("frequency must be positive");
  if (!(amplitude >= 0.0)) throw DomainError("amplitude must be non-negative");
  PulseParams p;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.gravity = gravity;
  const double w = kTwoPi * frequency;
  p.pga = amplitude * w * w;
  p.kappa = 1.0 / w;
  return p;
}

GroundMotionProfile pulse_profile(const PulseParams& params, double sample_rate) {
  require_sampling(params, sample_rate);
  const double end = params.duration();
  const double tol = 1e-12 * end;

  std::vector<double> times;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / sample_rate;
    if (t >= end - tol) break;
    times.push_back(t);
  }
  // Quarter-period instants carry the exact velocity and displacement peaks.
  for (double q : {0.25 * end, 0.5 * end, 0.75 * end}) times.push_back(q);
  times.push_back(end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [tol](double a, double b) { return std::abs(a - b) <= tol; }),
              times.end());

  GroundMotionProfile profile;
  profile.source = MotionSource::Pulse;
  for (double t : times)
    profile.samples.push_back({t, params.displacement(t), params.velocity(t), params.acceleration(t)});
  // cos/sin of 2*pi are not exactly 1/0 in floating point.
  profile.samples.front().d = 0.0;
  profile.samples.front().v = 0.0;
  profile.samples.back().d = 0.0;
  profile.samples.back().v = 0.0;
  return profile;
}

double VelocityCommandSeries::net_displacement() const {
  return std::accumulate(commands.begin(), commands.end(), 0.0) / rate_hz;
}

double VelocityCommandSeries::excursion() const {
  double pos = 0.0, lo = 0.0, hi = 0.0;
  for (double v : commands) {
    pos += v / rate_hz;
    lo = std::min(lo, pos);
    hi = std::max(hi, pos);
  }
  return hi - lo;
}

double VelocityCommandSeries::peak_speed() const {
  double peak = 0.0;
  for (double v : commands) peak = std::max(peak, std::abs(v));
  return peak;
}

VelocityCommandSeries sample_velocity_commands(const PulseParams& params, double rate_hz,
                                               PulseSpan span) {
  require_sampling(params, rate_hz);
  const double end = span == PulseSpan::Full ? params.duration() : 0.5 * params.duration();
  const auto count = static_cast<std::size_t>(std::floor(end * rate_hz + 1e-9)) + 1;
  VelocityCommandSeries series;
  series.rate_hz = rate_hz;
  series.commands.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    series.commands[k] = params.velocity(static_cast<double>(k) / rate_hz);
  series.commands.front() = 0.0;
  return series;
}

void SeismogramRecord::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("seismogram dt must be positive");
  if (accel.empty()) throw DomainError("seismogram has no samples");
  for (double a : accel)
    if (!std::isfinite(a)) throw DomainError("seismogram contains a non-finite sample");
}

std::vector<double> integrate_acceleration(const SeismogramRecord& record) {
  record.validate();
  std::vector<double> v(record.accel.size(), 0.0);
  for (std::size_t k = 1; k < v.size(); ++k)
    v[k] = v[k - 1] + 0.5 * (record.accel[k - 1] + record.accel[k]) * record.dt;
  return v;
}

double interpolate_uniform(std::span<const double> values, double dt, double t) {
  if (values.empty()) return 0.0;
  if (t <= 0.0) return values.front();
  const double x = t / dt;
  const auto i = static_cast<std::size_t>(std::floor(x));
  if (i + 1 >= values.size()) return values.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

VelocityCommandSeries seismogram_to_commands(const SeismogramRecord& record,
                                             const SeismogramFilters& filters, double rate_hz) {
  record.validate();
  if (!(rate_hz > 0.0)) throw DomainError("command rate must be positive");

  SeismogramRecord smoothed = record;
  smoothed.accel = apply_filter(record.accel, record.dt, filters.lowpass);
  const auto velocity = apply_filter(integrate_acceleration(smoothed), record.dt, filters.highpass);

  const double span = record.dt * static_cast<double>(record.accel.size() - 1);
  const auto count = static_cast<std::size_t>(std::floor(span * rate_hz + 1e-9)) + 1;
  VelocityCommandSeries series;
  series.rate_hz = rate_hz;
  series.commands.resize(count);
  for (std::size_t k = 0; k < count; ++k)
    series.commands[k] = interpolate_uniform(velocity, record.dt, static_cast<double>(k) / rate_hz);

  const double mean = std::accumulate(series.commands.begin(), series.commands.end(), 0.0) /
                      static_cast<double>(count);
  for (double& v : series.commands) v -= mean;
  return series;
}

}  // namespace shakebot::motion
