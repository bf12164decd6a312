#include "shakebot/safety.hpp"

#include <string>

#include "shakebot/errors.hpp"

namespace shakebot::actuation {

std::string_view to_string(SafetyMode mode) {
  switch (mode) {
    case SafetyMode::Idle: return "Idle";
    case SafetyMode::Running: return "Running";
    case SafetyMode::SoftEStop: return "SoftEStop";
    case SafetyMode::HardEStop: return "HardEStop";
  }
  return "?";
}

std::string_view to_string(SafetyEvent event) {
  switch (event) {
    case SafetyEvent::LimitSwitch: return "LimitSwitch";
    case SafetyEvent::EStopPressed: return "EStopPressed";
    case SafetyEvent::Reset: return "Reset";
    case SafetyEvent::PowerCycle: return "PowerCycle";
  }
  return "?";
}

void SafetyState::begin_execution() {
  if (mode_ != SafetyMode::Idle)
    throw SafetyInterlock("execution refused: safety state is " + std::string(to_string(mode_)));
  mode_ = SafetyMode::Running;
}

void SafetyState::finish_execution() {
  if (mode_ == SafetyMode::Running) mode_ = SafetyMode::Idle;
}

}  // namespace shakebot::actuation
