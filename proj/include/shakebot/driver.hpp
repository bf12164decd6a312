#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "shakebot/actuation.hpp"
#include "shakebot/safety.hpp"

namespace shakebot::actuation {

/// Rail end. Left is the low-position end.
enum class Side { Left, Right };

/// Boundary between pulse generation and whatever turns pulses into motion
/// (a real stepper driver or MockDriver). Pulses must be delivered in time
/// order; hardware may deliver them within +/-10% of the inter-pulse interval.
class DriverInterface {
public:
  using LimitCallback = std::function<void(Side)>;
  using FaultCallback = std::function<void(const std::string&)>;

  virtual ~DriverInterface() = default;

  virtual void arm() = 0;
  virtual void pulse(int direction, double time) = 0;
  virtual void disable() = 0;

  /// Encoder-derived bed position, m.
  virtual double position() const = 0;
  /// Bed-position calibration switch state.
  virtual bool calibration_switch(Side side) const = 0;

  virtual void on_limit_switch(LimitCallback callback) = 0;
  virtual void on_fault(FaultCallback callback) = 0;
};

struct MockDriverConfig {
  double start_position = 0.2;
  double travel_limit = 0.45;
  /// 2 pi r / microsteps_per_rev for the nominal pulley radius.
  double nominal_meters_per_step = 2.0 * std::numbers::pi * 0.02591 / 2000.0;
  /// Hidden physical ratio of actual to nominal travel per step.
  double transmission_ratio = 1.0;
  bool limit_switches = true;
  /// Bed-position calibration switches, just inside the limit switches.
  double calibration_left = 0.01;
  double calibration_right = 0.44;
  /// Raise a driver fault on this pulse (0-based), for fault-path tests.
  std::optional<std::size_t> fault_at_pulse;
};

/// Ideal closed-loop stepper: every accepted pulse moves the bed exactly one
/// physical step. Crossing either rail end with limit switches enabled clamps
/// the bed at the switch and fires the limit callback.
class MockDriver : public DriverInterface {
public:
  explicit MockDriver(MockDriverConfig config = {});

  void arm() override;
  void pulse(int direction, double time) override;
  void disable() override;
  double position() const override { return position_; }
  bool calibration_switch(Side side) const override;
  void on_limit_switch(LimitCallback callback) override { limit_cb_ = std::move(callback); }
  void on_fault(FaultCallback callback) override { fault_cb_ = std::move(callback); }

  bool armed() const { return armed_; }
  double physical_meters_per_step() const;
  std::size_t pulses_received() const { return pulses_; }
  long signed_steps() const { return signed_steps_; }
  const MockDriverConfig& config() const { return config_; }

private:
  MockDriverConfig config_;
  double position_;
  bool armed_ = false;
  std::size_t pulses_ = 0;
  long signed_steps_ = 0;
  double last_time_ = -1e300;
  LimitCallback limit_cb_;
  FaultCallback fault_cb_;
};

struct TelemetrySample {
  double time = 0.0;
  double position = 0.0;
  double velocity = 0.0;
};

struct TelemetryEvent {
  double time = 0.0;
  SafetyEvent event = SafetyEvent::LimitSwitch;
  std::string detail;
};

struct TelemetryLog {
  std::vector<TelemetrySample> samples;
  std::vector<TelemetryEvent> events;
  bool completed = true;

  bool soft_stopped() const;
  /// Piecewise-constant position at time t (the bed holds between pulses).
  double position_at(double t) const;
};

/// Streams the train to the driver in time order. Refused unless safety is
/// Idle. A limit switch moves safety to SoftEStop, disables the motor and
/// truncates execution; a driver fault moves it to HardEStop.
TelemetryLog execute(const StepTrain& train, DriverInterface& driver, SafetyState& safety,
                     double start_time = 0.0);

}  // namespace shakebot::actuation
