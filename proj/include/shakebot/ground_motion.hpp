#pragma once

#include <span>
#include <string>
#include <vector>

#include "shakebot/filter.hpp"

namespace shakebot::motion {

inline constexpr double kStandardGravity = 9.80665;

/// Single-pulse cosine ground motion d(t) = A - A cos(2 pi f t), t in [0, 1/f].
///
/// Both representations are stored: the user-facing (pga, kappa) pair and the
/// trajectory-planner pair (amplitude, frequency). kappa is PGV/PGA in seconds.
struct PulseParams {
  double amplitude = 0.0;  // A, m
  double frequency = 1.0;  // f, Hz
  double pga = 0.0;        // m/s^2
  double kappa = 1.0;      // s
  double gravity = kStandardGravity;

  double duration() const { return 1.0 / frequency; }
  double pgv() const;
  /// Peak displacement of the full pulse, 2A.
  double peak_displacement() const { return 2.0 * amplitude; }
  double pga_in_g() const { return pga / gravity; }

  double displacement(double t) const;
  double velocity(double t) const;
  double acceleration(double t) const;
};

/// Converts (PGA, PGV/PGA) into pulse parameters. Throws DomainError when
/// kappa <= 0 or pga < 0.
PulseParams pulse_from_pga_kappa(double pga, double kappa, double gravity = kStandardGravity);

/// Reads (pga, kappa) back from (A, f).
PulseParams pulse_from_amplitude_frequency(double amplitude, double frequency,
                                           double gravity = kStandardGravity);

enum class MotionSource { Pulse, Seismogram };

struct MotionSample {
  double t = 0.0;
  double d = 0.0;
  double v = 0.0;
  double a = 0.0;
};

struct GroundMotionProfile {
  std::vector<MotionSample> samples;
  MotionSource source = MotionSource::Pulse;
};

/// Samples the pulse at k/sample_rate, at the quarter-period instants (where
/// the velocity and displacement peaks occur) and at the exact end point t = 1/f.
/// Throws DomainError when sample_rate < 2f.
GroundMotionProfile pulse_profile(const PulseParams& params, double sample_rate);

/// Uniformly sampled desired bed velocities. Each command holds for 1/rate_hz.
struct VelocityCommandSeries {
  double rate_hz = 200.0;
  double t0 = 0.0;
  std::vector<double> commands;

  double period() const { return 1.0 / rate_hz; }
  double duration() const { return static_cast<double>(commands.size()) / rate_hz; }
  /// Integral of the zero-order-hold velocity, i.e. net commanded displacement.
  double net_displacement() const;
  /// Largest excursion (max - min) of the running commanded displacement, start included.
  double excursion() const;
  double peak_speed() const;
};

/// Which part of the pulse to command: the full period, or the half-cosine
/// t in [0, 1/(2f)] used for transmission calibration.
enum class PulseSpan { Full, Half };

/// commands[k] = v(k / rate_hz) for k = 0 .. floor(span * rate_hz).
VelocityCommandSeries sample_velocity_commands(const PulseParams& params, double rate_hz,
                                               PulseSpan span = PulseSpan::Full);

/// Uniformly sampled accelerogram.
struct SeismogramRecord {
  double dt = 0.01;
  std::vector<double> accel;
  std::string label;

  void validate() const;
};

/// Cumulative trapezoid integral with v[0] = 0.
std::vector<double> integrate_acceleration(const SeismogramRecord& record);

struct SeismogramFilters {
  FilterSpec lowpass{FilterKind::LowPass, 2, 20.0};
  FilterSpec highpass{FilterKind::HighPass, 2, 0.1};
};

/// low-pass(accel) -> integrate -> high-pass(velocity) -> linear resample onto
/// rate_hz -> residual-mean removal. Every stage is linear in the record.
VelocityCommandSeries seismogram_to_commands(const SeismogramRecord& record,
                                             const SeismogramFilters& filters, double rate_hz);

/// Linear interpolation of a uniformly sampled series starting at t = 0.
/// Outside the sampled span the end values are held.
double interpolate_uniform(std::span<const double> values, double dt, double t);

}  // namespace shakebot::motion
