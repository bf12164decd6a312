#pragma once

#include <string_view>

namespace shakebot::actuation {

enum class SafetyMode { Idle, Running, SoftEStop, HardEStop };

enum class SafetyEvent { LimitSwitch, EStopPressed, Reset, PowerCycle };

/// Two-level stop logic. Limit switches disable the motor (soft stop, cleared
/// by Reset); the operator e-stop cuts driver power (hard stop, cleared only by
/// PowerCycle). Hard dominates soft. Unlisted (mode, event) pairs are no-ops.
constexpr SafetyMode next_safety_mode(SafetyMode mode, SafetyEvent event) {
  switch (event) {
    case SafetyEvent::EStopPressed:
      return SafetyMode::HardEStop;
    case SafetyEvent::LimitSwitch:
      return mode == SafetyMode::HardEStop ? mode : SafetyMode::SoftEStop;
    case SafetyEvent::Reset:
      return mode == SafetyMode::SoftEStop ? SafetyMode::Idle : mode;
    case SafetyEvent::PowerCycle:
      return mode == SafetyMode::HardEStop ? SafetyMode::Idle : mode;
  }
  return mode;
}

std::string_view to_string(SafetyMode mode);
std::string_view to_string(SafetyEvent event);

class SafetyState {
public:
  SafetyMode mode() const { return mode_; }
  bool motor_enabled() const { return mode_ == SafetyMode::Idle || mode_ == SafetyMode::Running; }

  SafetyMode apply(SafetyEvent event) {
    mode_ = next_safety_mode(mode_, event);
    return mode_;
  }

  /// Idle -> Running. Throws SafetyInterlock in any other mode.
  void begin_execution();
  /// Running -> Idle; stop modes are left untouched.
  void finish_execution();

private:
  SafetyMode mode_ = SafetyMode::Idle;
};

}  // namespace shakebot::actuation
