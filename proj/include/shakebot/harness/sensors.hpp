#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "shakebot/calibration.hpp"
#include "shakebot/driver.hpp"
#include "shakebot/perception.hpp"

namespace shakebot::harness {

/// Top-down camera watching a set of markers fixed to the bed. Each marker
/// reports its camera-frame pose with the bed offset divided by the true
/// perception scale, plus Gaussian noise on the translation.
struct CameraModel {
  double rate_hz = 30.0;
  double phase_s = 0.0;
  double noise_m = 2e-4;  // absolute standard deviation per axis
  /// Additional standard deviation proportional to |position - datum|.
  double relative_noise = 0.0;
  double datum = 0.0;
  double true_sigma = 1.0;
  int n_markers = 4;
  Eigen::Vector3d bed_axis = Eigen::Vector3d::UnitX();
};

/// Marker frame for a bed at `position`, one detection per marker.
std::vector<perception::MarkerDetection> synth_frame(const CameraModel& model, double position,
                                                     double time, std::mt19937_64& rng);

/// Frames at phase + k/rate inside [t_begin, t_end], following the telemetry.
std::vector<perception::MarkerDetection> synth_marker_stream(const actuation::TelemetryLog& log,
                                                             const CameraModel& model,
                                                             double t_begin, double t_end,
                                                             std::mt19937_64& rng);

struct ImuModel {
  double rate_hz = 200.0;
  double phase_s = 0.0;
  double noise_ms2 = 0.02;
  Eigen::Vector3d bed_axis = Eigen::Vector3d::UnitX();
};

/// Accelerometer samples at phase + k/rate inside [t_begin, t_end] of the bed
/// acceleration `accel(t)` plus Gaussian noise on every axis.
std::vector<perception::AccelSample> synth_accel_stream(const std::function<double(double)>& accel,
                                                        const ImuModel& model, double t_begin,
                                                        double t_end, std::mt19937_64& rng);

/// MarkerSource that looks at a live driver.
class SyntheticCamera : public calibration::MarkerSource {
public:
  SyntheticCamera(const actuation::DriverInterface& driver, CameraModel model, std::uint64_t seed)
      : driver_(driver), model_(std::move(model)), rng_(seed) {}

  std::vector<perception::MarkerDetection> capture(double time) override {
    return synth_frame(model_, driver_.position(), time, rng_);
  }

private:
  const actuation::DriverInterface& driver_;
  CameraModel model_;
  std::mt19937_64 rng_;
};

/// Independent stream seeds derived from one run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace shakebot::harness
