#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "shakebot/actuation.hpp"
#include "shakebot/driver.hpp"
#include "shakebot/errors.hpp"
#include "shakebot/safety.hpp"

using namespace shakebot;
using namespace shakebot::actuation;

namespace {

motion::VelocityCommandSeries constant_series(double v, double seconds, double rate = 200.0) {
  motion::VelocityCommandSeries s;
  s.rate_hz = rate;
  s.commands.assign(static_cast<std::size_t>(std::lround(seconds * rate)), v);
  return s;
}

constexpr SafetyMode kModes[] = {SafetyMode::Idle, SafetyMode::Running, SafetyMode::SoftEStop,
                                 SafetyMode::HardEStop};
constexpr SafetyEvent kEvents[] = {SafetyEvent::LimitSwitch, SafetyEvent::EStopPressed,
                                   SafetyEvent::Reset, SafetyEvent::PowerCycle};

}  // namespace

TEST_CASE("feasibility at the rig defaults") {
  const auto r = feasibility_check({}, {}, 4.0, 11.8, 0.5);
  CHECK(r.force == doctest::Approx(60.21).epsilon(5e-4));
  CHECK(r.achievable_accel == doctest::Approx(15.052).epsilon(1e-4));
  CHECK(r.accel_margin_ratio == doctest::Approx(1.28).epsilon(0.01));
  CHECK(r.accel_ok);
  CHECK(r.pulse_limited_speed == doctest::Approx(0.52).epsilon(0.01));
  CHECK(r.max_belt_speed == doctest::Approx(std::min(r.rpm_limited_speed, r.pulse_limited_speed)));
  CHECK(r.velocity_ok);
  CHECK(r.ok());

  CHECK(feasibility_check({}, {}, 2.0, 11.8, 0.5).achievable_accel == doctest::Approx(30.1).epsilon(1e-3));
  CHECK_FALSE(feasibility_check({}, {}, 6.0, 11.8, 0.5).accel_ok);
  CHECK_FALSE(feasibility_check({}, {}, 4.0, 11.8, 0.6).velocity_ok);
}

TEST_CASE("feasibility monotonicity") {
  double last = 1e300;
  for (double m = 0.5; m < 20.0; m += 0.5) {
    const double a = feasibility_check({}, {}, m, 1.0, 0.1).achievable_accel;
    CHECK(a < last);
    last = a;
  }
  last = 0.0;
  for (double tau = 0.2; tau < 5.0; tau += 0.2) {
    MotorSpec motor;
    motor.torque_at_max_speed = tau;
    const double a = feasibility_check(motor, {}, 4.0, 1.0, 0.1).achievable_accel;
    CHECK(a > last);
    last = a;
  }
}

TEST_CASE("angular velocity") {
  CHECK(angular_velocity(0.5, {}, {}) == doctest::Approx(19.2976).epsilon(1e-5));
  CHECK(angular_velocity(0.0, {}, {}) == 0.0);
  Drivetrain d;
  d.gamma = 1.02;
  CHECK(angular_velocity(0.5, d, {}) == doctest::Approx(1.02 * 0.5 / 0.02591));
  try {
    angular_velocity(4.0, {}, {});
    FAIL("expected rejection");
  } catch (const MotionRejected& e) {
    CHECK(e.reason() == MotionRejected::Reason::OverSpeed);
    CHECK(e.limit() == doctest::Approx(1200.0 * 2.0 * std::numbers::pi / 60.0));
  }
}

TEST_CASE("motor parameter validation") {
  MotorSpec m;
  m.microsteps_per_rev = 2001;
  CHECK_THROWS_AS(m.validate(), DomainError);
  Drivetrain d;
  d.gamma = 2.5;
  CHECK_THROWS_AS(d.validate(), DomainError);
  d.gamma = 1.0;
  d.pulley_radius = 0.0;
  CHECK_THROWS_AS(d.validate(), DomainError);
  CHECK(nominal_meters_per_step({}, {}) == doctest::Approx(8.1399e-5).epsilon(1e-4));
}

TEST_CASE("half-cosine step count") {
  const auto p = motion::pulse_from_pga_kappa(0.98, 0.1);
  const auto s = motion::sample_velocity_commands(p, 200.0, motion::PulseSpan::Half);
  const auto train = commands_to_step_train(s, {}, {});
  CHECK(train.meters_per_step == doctest::Approx(2.0 * std::numbers::pi * 0.02591 / 2000.0));
  CHECK(train.signed_steps() == 241);

  MockDriver driver;
  SafetyState safety;
  const auto log = execute(train, driver, safety);
  CHECK(log.completed);
  CHECK(std::abs(driver.position() - 0.2196) <= train.meters_per_step);
  CHECK(safety.mode() == SafetyMode::Idle);
}

TEST_CASE("empty and zero trains") {
  const auto train = commands_to_step_train(constant_series(0.0, 1.0), {}, {});
  CHECK(train.empty());
  MockDriver driver;
  SafetyState safety;
  const auto log = execute(train, driver, safety);
  REQUIRE(log.samples.size() == 1);
  CHECK(log.samples[0].position == 0.2);
  CHECK(log.samples[0].velocity == 0.0);
}

TEST_CASE("rejections before emission") {
  try {
    commands_to_step_train(constant_series(0.5, 1.2), {}, {});
    FAIL("expected stroke rejection");
  } catch (const MotionRejected& e) {
    CHECK(e.reason() == MotionRejected::Reason::StrokeOverflow);
    CHECK(e.limit() == 0.45);
  }
  try {
    commands_to_step_train(constant_series(0.6, 0.1), {}, {});
    FAIL("expected pulse-rate rejection");
  } catch (const MotionRejected& e) {
    CHECK(e.reason() == MotionRejected::Reason::PulseRateExceeded);
  }
  CHECK_THROWS_AS(commands_to_step_train(constant_series(4.0, 0.01), {}, {}), MotionRejected);
}

TEST_CASE("step train timing contract") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> v(-0.5, 0.5);
  motion::VelocityCommandSeries s;
  for (int k = 0; k < 60; ++k) s.commands.push_back(v(rng));
  const auto train = commands_to_step_train(s, {}, {});
  const double cap = 1.0 / 6400.0;
  for (std::size_t i = 1; i < train.pulses.size(); ++i) {
    const auto& a = train.pulses[i - 1];
    const auto& b = train.pulses[i];
    CHECK(b.time > a.time);
    const double gap = a.direction == b.direction ? cap : 2.0 * cap;
    CHECK(b.time - a.time >= gap * (1.0 - 1e-9));
  }
}

TEST_CASE("step count conservation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> v(-0.4, 0.4), g(0.6, 1.9);
  for (int trial = 0; trial < 200; ++trial) {
    Drivetrain d;
    d.gamma = g(rng);
    motion::VelocityCommandSeries s;
    const int n = 1 + static_cast<int>(rng() % 80);
    for (int k = 0; k < n; ++k) s.commands.push_back(v(rng) / d.gamma);
    StepTrain train;
    try {
      train = commands_to_step_train(s, {}, d);
    } catch (const MotionRejected&) {
      continue;
    }
    const double predicted = static_cast<double>(train.signed_steps()) * train.meters_per_step;
    CHECK(std::abs(predicted - s.net_displacement()) <= train.meters_per_step);
  }
}

TEST_CASE("mock position is start plus signed steps") {
  std::mt19937_64 rng(23);
  MockDriverConfig cfg;
  cfg.transmission_ratio = 1.013;
  for (int trial = 0; trial < 50; ++trial) {
    MockDriver driver(cfg);
    driver.arm();
    long steps = 0;
    for (int i = 0; i < 2000; ++i) {
      const int dir = (rng() % 3) ? 1 : -1;
      driver.pulse(dir, i * 1e-3);
      steps += dir;
    }
    CHECK(driver.signed_steps() == steps);
    CHECK(driver.position() == cfg.start_position + static_cast<double>(steps) * driver.physical_meters_per_step());
    CHECK(driver.physical_meters_per_step() == cfg.nominal_meters_per_step * cfg.transmission_ratio);
  }
}

TEST_CASE("limit switch stops the run") {
  MockDriverConfig cfg;
  cfg.start_position = 0.4;
  MockDriver driver(cfg);
  SafetyState safety;
  const auto train = commands_to_step_train(constant_series(0.2, 0.5), {}, {});
  const auto log = execute(train, driver, safety);
  CHECK_FALSE(log.completed);
  CHECK(log.soft_stopped());
  CHECK(safety.mode() == SafetyMode::SoftEStop);
  CHECK_FALSE(safety.motor_enabled());
  CHECK_FALSE(driver.armed());
  CHECK(driver.position() == 0.45);
  CHECK(log.samples.back().position == 0.45);

  CHECK_THROWS_AS(execute(train, driver, safety), SafetyInterlock);
  safety.apply(SafetyEvent::Reset);
  CHECK(safety.mode() == SafetyMode::Idle);
}

TEST_CASE("telemetry stays on the rail unless soft-stopped") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> v(-0.4, 0.4);
  for (int trial = 0; trial < 40; ++trial) {
    motion::VelocityCommandSeries s;
    for (int k = 0; k < 100; ++k) s.commands.push_back(v(rng));
    StepTrain train;
    try {
      train = commands_to_step_train(s, {}, {});
    } catch (const MotionRejected&) {
      continue;
    }
    MockDriver driver;
    SafetyState safety;
    const auto log = execute(train, driver, safety);
    if (log.soft_stopped()) continue;
    for (const auto& sample : log.samples) {
      CHECK(sample.position >= 0.0);
      CHECK(sample.position <= 0.45);
    }
  }
}

TEST_CASE("driver fault is a hard stop") {
  MockDriverConfig cfg;
  cfg.fault_at_pulse = 10;
  MockDriver driver(cfg);
  SafetyState safety;
  const auto log = execute(commands_to_step_train(constant_series(0.1, 0.2), {}, {}), driver, safety);
  CHECK_FALSE(log.completed);
  CHECK(safety.mode() == SafetyMode::HardEStop);
  REQUIRE(log.events.size() == 1);
  CHECK(log.events[0].event == SafetyEvent::EStopPressed);
  CHECK(driver.pulses_received() == 10);
  safety.apply(SafetyEvent::Reset);
  CHECK(safety.mode() == SafetyMode::HardEStop);
  safety.apply(SafetyEvent::PowerCycle);
  CHECK(safety.mode() == SafetyMode::Idle);
}

TEST_CASE("safety transition table") {
  CHECK(next_safety_mode(SafetyMode::Running, SafetyEvent::LimitSwitch) == SafetyMode::SoftEStop);
  CHECK(next_safety_mode(SafetyMode::SoftEStop, SafetyEvent::EStopPressed) == SafetyMode::HardEStop);
  CHECK(next_safety_mode(SafetyMode::HardEStop, SafetyEvent::Reset) == SafetyMode::HardEStop);

  for (auto m : kModes) {
    for (auto e : kEvents) {
      SafetyMode expected = m;
      switch (e) {
        case SafetyEvent::EStopPressed:
          expected = SafetyMode::HardEStop;
          break;
        case SafetyEvent::LimitSwitch:
          expected = m == SafetyMode::HardEStop ? m : SafetyMode::SoftEStop;
          break;
        case SafetyEvent::Reset:
          if (m == SafetyMode::SoftEStop) expected = SafetyMode::Idle;
          break;
        case SafetyEvent::PowerCycle:
          if (m == SafetyMode::HardEStop) expected = SafetyMode::Idle;
          break;
      }
      CHECK(next_safety_mode(m, e) == expected);
      CHECK(next_safety_mode(m, e) == next_safety_mode(m, e));
      CHECK_FALSE(to_string(m).empty());
      CHECK_FALSE(to_string(e).empty());
    }
  }
}

TEST_CASE("execution requires Idle") {
  SafetyState safety;
  safety.begin_execution();
  CHECK(safety.mode() == SafetyMode::Running);
  CHECK_THROWS_AS(safety.begin_execution(), SafetyInterlock);
  safety.finish_execution();
  CHECK(safety.mode() == SafetyMode::Idle);
  safety.apply(SafetyEvent::EStopPressed);
  MockDriver driver;
  CHECK_THROWS_AS(execute({}, driver, safety), SafetyInterlock);
}
