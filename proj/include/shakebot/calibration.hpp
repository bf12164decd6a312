#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shakebot/actuation.hpp"
#include "shakebot/driver.hpp"
#include "shakebot/perception.hpp"
#include "shakebot/safety.hpp"

namespace shakebot::calibration {

/// Paired displacements for D = factor * d.
struct CalibrationSampleSet {
  std::vector<double> reference;  // D, ground truth
  std::vector<double> measured;   // d
  std::vector<std::string> labels;

  void validate() const;
};

struct CalibrationResult {
  double factor = 1.0;
  double residual_rms = 0.0;
  std::size_t n_samples = 0;
};

/// Least-squares scalar solution of the overdetermined system D = factor * d:
/// factor = (d.D) / (d.d). Throws DegenerateData when d.d = 0.
CalibrationResult estimate_scale(const CalibrationSampleSet& samples);

/// One half-cosine trial: commanded net displacement and what the markers saw.
struct GammaTrial {
  double desired = 0.0;   // D
  double measured = 0.0;  // D'
};

/// Transmission ratio from D' = factor * D over >= 2 trials with distinct D.
CalibrationResult estimate_gamma(std::span<const GammaTrial> trials);

/// Installs the controller compensation for a measured transmission ratio
/// (drivetrain.gamma = 1 / factor). Throws DomainError when the factor is
/// outside (0.5, 2.0).
actuation::Drivetrain apply_gamma(const actuation::Drivetrain& drivetrain,
                                  const CalibrationResult& result);

/// Anything that can report a frame of marker detections on demand.
class MarkerSource {
public:
  virtual ~MarkerSource() = default;
  virtual std::vector<perception::MarkerDetection> capture(double time) = 0;
};

struct PerceptionCalibrationOptions {
  double measured_stroke = 0.45;  // between the calibration switches, m
  int n_random_points = 50;
  std::uint64_t seed = 1;
  long step_budget = 20000;
  double jog_rate_hz = 2000.0;
  Eigen::Vector3d bed_axis = Eigen::Vector3d::UnitX();
};

struct PerceptionCalibration {
  CalibrationResult sigma;
  double meters_per_step = 0.0;
  long stroke_steps = 0;
  CalibrationSampleSet samples;
};

/// Homes on the left calibration switch, counts steps to the right switch to
/// get the translational step resolution, then visits random positions and
/// fits sigma between step-derived and marker-derived displacements.
/// Throws HardwareFault when a switch does not trigger within the step budget.
PerceptionCalibration run_perception_calibration(actuation::DriverInterface& driver,
                                                 MarkerSource& camera,
                                                 const PerceptionCalibrationOptions& options);

struct GammaCalibrationOptions {
  int n_trials = 20;
  double min_displacement = 0.05;  // m
  double max_displacement = 0.20;  // m
  double kappa = 0.3;              // s, fixes the half-cosine frequency
  double rate_hz = 200.0;
  double sigma = 1.0;  // perception scale applied to marker displacements
  std::uint64_t seed = 1;
  Eigen::Vector3d bed_axis = Eigen::Vector3d::UnitX();
};

struct GammaCalibration {
  CalibrationResult gamma;
  std::vector<GammaTrial> trials;
};

/// Runs random half-cosine motions with an uncalibrated controller (gamma = 1)
/// and fits D' = gamma D from marker measurements.
GammaCalibration run_gamma_calibration(actuation::DriverInterface& driver, MarkerSource& camera,
                                       const actuation::MotorSpec& motor,
                                       const actuation::Drivetrain& drivetrain,
                                       actuation::SafetyState& safety,
                                       const GammaCalibrationOptions& options);

}  // namespace shakebot::calibration
