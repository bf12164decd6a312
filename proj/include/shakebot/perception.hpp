#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shakebot/filter.hpp"

namespace shakebot::perception {

/// Rigid transform H = [R t; 0 1].
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose from_quaternion(double qw, double qx, double qy, double qz,
                              const Eigen::Vector3d& translation);
  static Pose from_translation(const Eigen::Vector3d& translation);

  /// (R^T, -R^T t).
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;
  /// R^T R = I and det R = +1 within tol.
  bool is_rigid(double tol = 1e-9) const;
};

struct MarkerDetection {
  int marker_id = 0;
  double time = 0.0;
  Pose pose_in_camera;
};

struct AccelSample {
  double time = 0.0;
  Eigen::Vector3d accel = Eigen::Vector3d::Zero();
};

struct DisplacementSample {
  double time = 0.0;
  double displacement = 0.0;
  int n_markers_used = 0;
};

struct TimedValue {
  double t = 0.0;
  double v = 0.0;
};

/// Pose of marker position i expressed in the frame of marker position j:
/// H_i^j = (H_j^c)^-1 H_i^c. Throws DomainError for non-rigid inputs.
Pose relative_pose(const Pose& pose_i, const Pose& pose_j);

/// Averages the bed-axis component of the relative translation over markers
/// visible in both frames, then scales by sigma. Throws OcclusionError when no
/// marker id is common to both frames.
DisplacementSample bed_displacement(std::span<const MarkerDetection> current,
                                    std::span<const MarkerDetection> reference, double sigma,
                                    const Eigen::Vector3d& bed_axis);

struct AxisAcceleration {
  double signed_accel = 0.0;
  double magnitude = 0.0;
  /// Magnitude exceeds |signed| by more than 5%: the sensor axis is misaligned.
  bool misaligned = false;
};

/// Projection onto the bed axis plus the Euclidean magnitude. The magnitude is
/// a diagnostic only; it cannot carry the sign needed for integration.
AxisAcceleration accel_along_axis(const AccelSample& sample, const Eigen::Vector3d& bed_axis);

/// First differences stamped at interval midpoints.
std::vector<TimedValue> derive_velocity_from_displacement(std::span<const DisplacementSample> samples);

/// Cumulative trapezoid starting from v0 at the first sample time.
std::vector<TimedValue> derive_velocity_from_accel(std::span<const TimedValue> accel, double v0);

/// Polynomial velocity model evaluated in centred, scaled time
/// s = (t - time_origin) / time_scale, which maps the fitted span to [-1, 1].
struct FusionModel {
  Eigen::VectorXd coefficients;  // ascending powers of s
  double time_origin = 0.0;
  double time_scale = 1.0;
  double t_start = 0.0;
  double t_end = 0.0;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  double evaluate(double t) const;
  bool extrapolating(double t) const { return t < t_start || t > t_end; }
  /// Largest |v| over the valid span on a uniform grid.
  double peak_speed(std::size_t grid = 4001) const;
};

struct FusionFit {
  FusionModel model;
  Eigen::VectorXd residuals;  // v_hat - v_s, v_d samples first
  double residual_rms = 0.0;
  std::size_t n_displacement = 0;
  std::size_t n_accel = 0;
};

/// Unweighted least squares over the pooled set v_d U v_a. Solved by
/// column-pivoting Householder QR; throws DegenerateData when the design is
/// rank deficient or the samples span zero time.
FusionFit fit_velocity(std::span<const TimedValue> v_d, std::span<const TimedValue> v_a,
                       int degree = 6);

/// Groups detections into frames by timestamp, in time order.
std::vector<std::vector<MarkerDetection>> group_frames(std::span<const MarkerDetection> detections);

/// Displacement of every frame relative to `reference`. Frames in which no
/// reference marker is visible are skipped.
std::vector<DisplacementSample> displacement_series(
    const std::vector<std::vector<MarkerDetection>>& frames,
    std::span<const MarkerDetection> reference, double sigma, const Eigen::Vector3d& bed_axis);

struct AccelStreamResult {
  std::vector<TimedValue> projected;  // after optional low-pass
  std::vector<TimedValue> velocity;
  std::size_t misaligned_samples = 0;
};

/// Project -> optional zero-phase low-pass (using the mean sample interval)
/// -> trapezoid integration from v0.
AccelStreamResult process_accel_stream(std::span<const AccelSample> samples,
                                       const Eigen::Vector3d& bed_axis,
                                       const std::optional<motion::FilterSpec>& lowpass, double v0);

}  // namespace shakebot::perception
