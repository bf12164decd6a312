#include "shakebot/calibration.hpp"

#include <cmath>
#include <random>

#include "shakebot/errors.hpp"
#include "shakebot/ground_motion.hpp"

namespace shakebot::calibration {

using actuation::DriverInterface;
using actuation::Side;

void CalibrationSampleSet::validate() const {
  if (reference.size() != measured.size())
    throw DomainError("calibration reference and measured vectors differ in length");
  if (reference.size() < 2) throw DomainError("calibration needs at least two samples");
  if (!labels.empty() && labels.size() != reference.size())
    throw DomainError("calibration labels do not match the sample count");
}

CalibrationResult estimate_scale(const CalibrationSampleSet& samples) {
  samples.validate();
  double dd = 0.0, dD = 0.0;
  for (std::size_t i = 0; i < samples.measured.size(); ++i) {
    dd += samples.measured[i] * samples.measured[i];
    dD += samples.measured[i] * samples.reference[i];
  }
  if (dd == 0.0) throw DegenerateData("all measured displacements are zero");

  CalibrationResult r;
  r.factor = dD / dd;
  r.n_samples = samples.measured.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < r.n_samples; ++i) {
    const double e = samples.reference[i] - r.factor * samples.measured[i];
    ss += e * e;
  }
  r.residual_rms = std::sqrt(ss / static_cast<double>(r.n_samples));
  return r;
}

CalibrationResult estimate_gamma(std::span<const GammaTrial> trials) {
  CalibrationSampleSet set;
  for (const auto& t : trials) {
    set.measured.push_back(t.desired);
    set.reference.push_back(t.measured);
  }
  set.validate();
  bool distinct = false;
  for (const auto& t : trials) distinct |= t.desired != trials.front().desired;
  if (!distinct) throw DegenerateData("gamma trials need at least two distinct desired displacements");
  return estimate_scale(set);
}

actuation::Drivetrain apply_gamma(const actuation::Drivetrain& drivetrain,
                                  const CalibrationResult& result) {
  if (!(result.factor > 0.5 && result.factor < 2.0))
    throw DomainError("transmission factor " + std::to_string(result.factor) +
                      " is outside the sanity band (0.5, 2.0); calibration likely failed");
  auto out = drivetrain;
  out.gamma = 1.0 / result.factor;
  return out;
}

namespace {

// Single-step jogging with a monotone pulse clock.
class Jogger {
public:
  Jogger(DriverInterface& driver, double rate_hz) : driver_(driver), period_(1.0 / rate_hz) {
    driver_.arm();
  }

  void step(int direction) {
    time_ += period_;
    driver_.pulse(direction, time_);
  }

  /// Steps toward `side` until its calibration switch reads true.
  long seek(Side side, long budget) {
    const int dir = side == Side::Left ? -1 : +1;
    long n = 0;
    while (!driver_.calibration_switch(side)) {
      if (n >= budget)
        throw HardwareFault(std::string(side == Side::Left ? "left" : "right") +
                            " calibration switch not triggered within " + std::to_string(budget) +
                            " steps");
      step(dir);
      ++n;
    }
    return n;
  }

  double time() const { return time_; }

private:
  DriverInterface& driver_;
  double period_;
  double time_ = 0.0;
};

}  // namespace

PerceptionCalibration run_perception_calibration(DriverInterface& driver, MarkerSource& camera,
                                                 const PerceptionCalibrationOptions& options) {
  if (!(options.measured_stroke > 0.0)) throw DomainError("measured stroke must be positive");
  if (options.n_random_points < 2) throw DomainError("need at least two calibration points");

  Jogger jog(driver, options.jog_rate_hz);
  jog.seek(Side::Left, options.step_budget);
  const auto reference = camera.capture(jog.time());

  PerceptionCalibration out;
  out.stroke_steps = jog.seek(Side::Right, options.step_budget);
  if (out.stroke_steps == 0) throw HardwareFault("calibration switches triggered without motion");
  out.meters_per_step = options.measured_stroke / static_cast<double>(out.stroke_steps);

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<long> target(0, out.stroke_steps);
  long count = out.stroke_steps;  // steps from the left switch
  for (int i = 0; i < options.n_random_points; ++i) {
    const long goal = target(rng);
    while (count != goal) {
      const int dir = goal > count ? 1 : -1;
      jog.step(dir);
      count += dir;
    }
    const auto frame = camera.capture(jog.time());
    const auto d = perception::bed_displacement(frame, reference, 1.0, options.bed_axis);
    out.samples.reference.push_back(static_cast<double>(count) * out.meters_per_step);
    out.samples.measured.push_back(d.displacement);
    out.samples.labels.push_back("point " + std::to_string(i) + " step " + std::to_string(count));
  }
  out.sigma = estimate_scale(out.samples);
  return out;
}

GammaCalibration run_gamma_calibration(DriverInterface& driver, MarkerSource& camera,
                                       const actuation::MotorSpec& motor,
                                       const actuation::Drivetrain& drivetrain,
                                       actuation::SafetyState& safety,
                                       const GammaCalibrationOptions& options) {
  if (options.n_trials < 2) throw DomainError("need at least two gamma trials");
  if (!(options.min_displacement > 0.0) || options.max_displacement <= options.min_displacement)
    throw DomainError("invalid gamma trial displacement range");

  auto uncalibrated = drivetrain;
  uncalibrated.gamma = 1.0;

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> pick(options.min_displacement, options.max_displacement);

  GammaCalibration out;
  double clock = 0.0;
  for (int i = 0; i < options.n_trials; ++i) {
    const double desired = pick(rng);
    // A half-cosine covers 2A = desired.
    const double amplitude = 0.5 * desired;
    const auto pulse = motion::pulse_from_pga_kappa(amplitude / (options.kappa * options.kappa),
                                                    options.kappa);
    auto series = motion::sample_velocity_commands(pulse, options.rate_hz, motion::PulseSpan::Half);

    const double pos = driver.position();
    const bool forward = pos + 1.2 * desired <= drivetrain.travel_limit;
    if (!forward)
      for (double& v : series.commands) v = -v;
    series.t0 = clock;

    const auto train = actuation::commands_to_step_train(series, motor, uncalibrated);
    const auto before = camera.capture(clock);
    actuation::execute(train, driver, safety, clock);
    clock += series.duration() + 0.1;
    const auto after = camera.capture(clock);

    const auto d = perception::bed_displacement(after, before, options.sigma, options.bed_axis);
    out.trials.push_back({desired, std::abs(d.displacement)});
  }
  out.gamma = estimate_gamma(out.trials);
  return out;
}

}  // namespace shakebot::calibration
