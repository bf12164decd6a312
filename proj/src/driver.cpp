#include "shakebot/driver.hpp"

#include <algorithm>

#include "shakebot/errors.hpp"

namespace shakebot::actuation {

MockDriver::MockDriver(MockDriverConfig config)
    : config_(std::move(config)), position_(config_.start_position) {}

void MockDriver::arm() {
  armed_ = true;
  last_time_ = -1e300;
}

void MockDriver::disable() { armed_ = false; }

double MockDriver::physical_meters_per_step() const {
  return config_.nominal_meters_per_step * config_.transmission_ratio;
}

bool MockDriver::calibration_switch(Side side) const {
  return side == Side::Left ? position_ <= config_.calibration_left
                            : position_ >= config_.calibration_right;
}

void MockDriver::pulse(int direction, double time) {
  if (!armed_) return;
  if (config_.fault_at_pulse && *config_.fault_at_pulse == pulses_) {
    armed_ = false;
    if (fault_cb_) fault_cb_("injected driver fault");
    return;
  }
  if (time < last_time_) {
    armed_ = false;
    if (fault_cb_) fault_cb_("pulse delivered out of time order");
    return;
  }
  last_time_ = time;
  ++pulses_;
  const int dir = direction >= 0 ? 1 : -1;
  signed_steps_ += dir;
  // Accumulate from the integer step count so the position stays exact.
  position_ = config_.start_position + static_cast<double>(signed_steps_) * physical_meters_per_step();

  if (!config_.limit_switches) return;
  if (position_ > config_.travel_limit || position_ < 0.0) {
    const Side side = position_ < 0.0 ? Side::Left : Side::Right;
    position_ = std::clamp(position_, 0.0, config_.travel_limit);
    armed_ = false;
    if (limit_cb_) limit_cb_(side);
  }
}

bool TelemetryLog::soft_stopped() const {
  return std::any_of(events.begin(), events.end(),
                     [](const TelemetryEvent& e) { return e.event == SafetyEvent::LimitSwitch; });
}

double TelemetryLog::position_at(double t) const {
  if (samples.empty()) return 0.0;
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double value, const TelemetrySample& s) { return value < s.time; });
  if (it == samples.begin()) return samples.front().position;
  return std::prev(it)->position;
}

TelemetryLog execute(const StepTrain& train, DriverInterface& driver, SafetyState& safety,
                     double start_time) {
  safety.begin_execution();

  std::optional<Side> limit_hit;
  std::optional<std::string> fault;
  driver.on_limit_switch([&](Side side) { limit_hit = side; });
  driver.on_fault([&](const std::string& what) { fault = what; });

  TelemetryLog log;
  driver.arm();
  log.samples.push_back({start_time, driver.position(), 0.0});

  for (const auto& p : train.pulses) {
    driver.pulse(p.direction, p.time);
    const auto& prev = log.samples.back();
    const double pos = driver.position();
    const double dt = p.time - prev.time;
    log.samples.push_back({p.time, pos, dt > 0.0 ? (pos - prev.position) / dt : 0.0});

    if (fault) {
      safety.apply(SafetyEvent::EStopPressed);
      driver.disable();
      log.events.push_back({p.time, SafetyEvent::EStopPressed, "driver fault: " + *fault});
      log.completed = false;
      break;
    }
    if (limit_hit) {
      safety.apply(SafetyEvent::LimitSwitch);
      driver.disable();
      log.events.push_back({p.time, SafetyEvent::LimitSwitch,
                            *limit_hit == Side::Left ? "left limit switch" : "right limit switch"});
      log.completed = false;
      break;
    }
  }

  driver.on_limit_switch({});
  driver.on_fault({});
  safety.finish_execution();
  return log;
}

}  // namespace shakebot::actuation
