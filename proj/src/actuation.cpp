#include "shakebot/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shakebot/errors.hpp"

namespace shakebot::actuation {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double MotorSpec::max_angular_speed() const { return max_speed_rpm * kTwoPi / 60.0; }

void MotorSpec::validate() const {
  if (!(torque_at_max_speed > 0.0) || !(max_speed_rpm > 0.0) || full_steps_per_rev <= 0 ||
      microsteps_per_rev <= 0)
    throw DomainError("motor parameters must be positive");
  if (microsteps_per_rev < full_steps_per_rev || microsteps_per_rev % full_steps_per_rev != 0)
    throw DomainError("microsteps_per_rev must be a multiple of full_steps_per_rev");
}

void Drivetrain::validate() const {
  if (!(pulley_radius > 0.0)) throw DomainError("pulley radius must be positive");
  if (!(gamma > 0.5 && gamma < 2.0)) throw DomainError("gamma outside sanity band (0.5, 2.0)");
  if (!(travel_limit > 0.0)) throw DomainError("travel limit must be positive");
  if (!(max_pulse_rate_hz > 0.0)) throw DomainError("pulse-rate cap must be positive");
}

double nominal_meters_per_step(const MotorSpec& motor, const Drivetrain& drivetrain) {
  return kTwoPi * drivetrain.pulley_radius / motor.microsteps_per_rev;
}

double calibrated_meters_per_step(const MotorSpec& motor, const Drivetrain& drivetrain) {
  return nominal_meters_per_step(motor, drivetrain) / drivetrain.gamma;
}

FeasibilityReport feasibility_check(const MotorSpec& motor, const Drivetrain& drivetrain,
                                    double payload_mass, double required_accel,
                                    double required_vel) {
  FeasibilityReport r;
  r.required_accel = required_accel;
  r.required_vel = required_vel;
  r.force = motor.torque_at_max_speed / drivetrain.pulley_radius;
  r.achievable_accel = r.force / payload_mass;
  r.accel_margin_ratio = r.achievable_accel / required_accel;
  r.rpm_limited_speed = motor.max_angular_speed() * drivetrain.pulley_radius;
  r.pulse_limited_speed = drivetrain.max_pulse_rate_hz * nominal_meters_per_step(motor, drivetrain);
  r.max_belt_speed = std::min(r.rpm_limited_speed, r.pulse_limited_speed);
  r.accel_ok = r.achievable_accel >= required_accel;
  r.velocity_ok = r.max_belt_speed >= required_vel;
  return r;
}

double angular_velocity(double v, const Drivetrain& drivetrain, const MotorSpec& motor) {
  const double omega = drivetrain.gamma * v / drivetrain.pulley_radius;
  const double limit = motor.max_angular_speed();
  if (std::abs(omega) > limit)
    throw MotionRejected(MotionRejected::Reason::OverSpeed,
                         "commanded angular speed " + std::to_string(std::abs(omega)) +
                             " rad/s exceeds motor limit " + std::to_string(limit) + " rad/s",
                         limit);
  return omega;
}

long StepTrain::signed_steps() const {
  long n = 0;
  for (const auto& p : pulses) n += p.direction;
  return n;
}

StepTrain commands_to_step_train(const motion::VelocityCommandSeries& series,
                                 const MotorSpec& motor, const Drivetrain& drivetrain) {
  motor.validate();
  drivetrain.validate();
  if (!(series.rate_hz > 0.0)) throw DomainError("command rate must be positive");

  const double steps_per_radian = motor.microsteps_per_rev / kTwoPi;
  std::vector<double> step_rates(series.commands.size());
  for (std::size_t k = 0; k < series.commands.size(); ++k) {
    const double rate = angular_velocity(series.commands[k], drivetrain, motor) * steps_per_radian;
    if (std::abs(rate) > drivetrain.max_pulse_rate_hz)
      throw MotionRejected(MotionRejected::Reason::PulseRateExceeded,
                           "pulse rate " + std::to_string(std::abs(rate)) +
                               " Hz exceeds cap " + std::to_string(drivetrain.max_pulse_rate_hz) +
                               " Hz",
                           drivetrain.max_pulse_rate_hz);
    step_rates[k] = rate;
  }
  const double excursion = series.excursion();
  if (excursion > drivetrain.travel_limit)
    throw MotionRejected(MotionRejected::Reason::StrokeOverflow,
                         "commanded excursion " + std::to_string(excursion) +
                             " m exceeds travel limit " + std::to_string(drivetrain.travel_limit) +
                             " m",
                         drivetrain.travel_limit);

  StepTrain train;
  train.meters_per_step = calibrated_meters_per_step(motor, drivetrain);

  const double h = series.period();
  double accumulated = 0.0;  // commanded fractional steps so far
  long emitted = 0;
  for (std::size_t k = 0; k < step_rates.size(); ++k) {
    const double s = step_rates[k];
    const double t_start = series.t0 + static_cast<double>(k) * h;
    const double end = accumulated + s * h;
    if (s > 0.0) {
      while (end >= static_cast<double>(emitted) + 0.5) {
        const double t = t_start + (static_cast<double>(emitted) + 0.5 - accumulated) / s;
        train.pulses.push_back({t, +1});
        ++emitted;
      }
    } else if (s < 0.0) {
      while (end <= static_cast<double>(emitted) - 0.5) {
        const double t = t_start + (static_cast<double>(emitted) - 0.5 - accumulated) / s;
        train.pulses.push_back({t, -1});
        --emitted;
      }
    }
    accumulated = end;
  }

  const double min_gap = 1.0 / drivetrain.max_pulse_rate_hz;
  for (std::size_t i = 1; i < train.pulses.size(); ++i) {
    const auto& prev = train.pulses[i - 1];
    auto& cur = train.pulses[i];
    const double gap = cur.direction == prev.direction ? min_gap : 2.0 * min_gap;
    cur.time = std::max(cur.time, prev.time + gap);
  }
  return train;
}

}  // namespace shakebot::actuation
