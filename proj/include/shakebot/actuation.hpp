#pragma once

#include <vector>

#include "shakebot/ground_motion.hpp"

namespace shakebot::actuation {

struct MotorSpec {
  double torque_at_max_speed = 1.56;  // N*m
  double max_speed_rpm = 1200.0;
  int full_steps_per_rev = 200;
  int microsteps_per_rev = 2000;

  double max_angular_speed() const;  // rad/s
  void validate() const;
};

/// Belt-and-pulley transmission.
///
/// `gamma` is the velocity-controller factor in omega' = gamma * v / r. A
/// transmission whose measured travel ratio is rho (actual / desired) is
/// compensated by gamma = 1 / rho; see calibration::apply_gamma.
struct Drivetrain {
  double pulley_radius = 0.02591;  // m
  double gamma = 1.0;
  double travel_limit = 0.45;  // m
  double max_pulse_rate_hz = 6400.0;

  void validate() const;
};

/// Bed travel per microstep assuming the nominal pulley radius.
double nominal_meters_per_step(const MotorSpec& motor, const Drivetrain& drivetrain);

/// Bed travel per microstep predicted by the calibrated controller: 2 pi r / (gamma * N).
double calibrated_meters_per_step(const MotorSpec& motor, const Drivetrain& drivetrain);

struct FeasibilityReport {
  double force = 0.0;             // N
  double achievable_accel = 0.0;  // m/s^2
  double accel_margin_ratio = 0.0;
  double rpm_limited_speed = 0.0;    // m/s
  double pulse_limited_speed = 0.0;  // m/s
  double max_belt_speed = 0.0;       // m/s
  double required_accel = 0.0;
  double required_vel = 0.0;
  bool accel_ok = false;
  bool velocity_ok = false;

  bool ok() const { return accel_ok && velocity_ok; }
};

/// Static motor sizing from F = m a = tau / r. Failures are reported, not thrown.
FeasibilityReport feasibility_check(const MotorSpec& motor, const Drivetrain& drivetrain,
                                    double payload_mass, double required_accel,
                                    double required_vel);

/// omega' = gamma v / r. Throws MotionRejected(OverSpeed) past the motor limit.
double angular_velocity(double v, const Drivetrain& drivetrain, const MotorSpec& motor);

struct StepPulse {
  double time = 0.0;
  int direction = 1;  // +1 or -1
};

/// Timed microstep schedule; the actuator wire format.
struct StepTrain {
  std::vector<StepPulse> pulses;
  /// Predicted bed travel per pulse under the controller's calibration.
  double meters_per_step = 0.0;

  long signed_steps() const;
  bool empty() const { return pulses.empty(); }
};

/// Converts held velocity commands into a pulse schedule.
///
/// Pulses are emitted when the commanded step accumulator crosses a
/// half-integer, so the signed total never differs from the commanded
/// fractional count by more than half a step. Direction reversals are spaced at
/// least two pulse periods apart. Throws MotionRejected for over-speed,
/// pulse-rate or stroke violations before emitting anything.
StepTrain commands_to_step_train(const motion::VelocityCommandSeries& series,
                                 const MotorSpec& motor, const Drivetrain& drivetrain);

}  // namespace shakebot::actuation
