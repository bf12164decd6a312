#include "shakebot/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shakebot/errors.hpp"

namespace shakebot::perception {

Pose Pose::from_quaternion(double qw, double qx, double qy, double qz,
                           const Eigen::Vector3d& translation) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (q.norm() < 1e-12) throw DomainError("zero quaternion");
  q.normalize();
  Pose p;
  p.rotation = q.toRotationMatrix();
  p.translation = translation;
  return p;
}

Pose Pose::from_translation(const Eigen::Vector3d& translation) {
  Pose p;
  p.translation = translation;
  return p;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

bool Pose::is_rigid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose relative_pose(const Pose& pose_i, const Pose& pose_j) {
  if (!pose_i.is_rigid() || !pose_j.is_rigid())
    throw DomainError("relative_pose: rotation is not orthonormal with det +1");
  return pose_j.inverse() * pose_i;
}

DisplacementSample bed_displacement(std::span<const MarkerDetection> current,
                                    std::span<const MarkerDetection> reference, double sigma,
                                    const Eigen::Vector3d& bed_axis) {
  double sum = 0.0;
  int used = 0;
  double latest = current.empty() ? 0.0 : current.front().time;
  for (const auto& cur : current) {
    latest = std::max(latest, cur.time);
    auto ref = std::find_if(reference.begin(), reference.end(),
                            [&](const MarkerDetection& r) { return r.marker_id == cur.marker_id; });
    if (ref == reference.end()) continue;
    const Pose rel = relative_pose(cur.pose_in_camera, ref->pose_in_camera);
    sum += rel.translation.dot(bed_axis);
    ++used;
  }
  if (used == 0) throw OcclusionError("no fiducial marker visible in both frames");
  return {latest, sigma * sum / used, used};
}

AxisAcceleration accel_along_axis(const AccelSample& sample, const Eigen::Vector3d& bed_axis) {
  if (std::abs(bed_axis.norm() - 1.0) > 1e-9) throw DomainError("bed axis must be a unit vector");
  AxisAcceleration out;
  out.signed_accel = sample.accel.dot(bed_axis);
  out.magnitude = sample.accel.norm();
  out.misaligned = out.magnitude > 1.05 * std::abs(out.signed_accel);
  return out;
}

std::vector<TimedValue> derive_velocity_from_displacement(std::span<const DisplacementSample> samples) {
  if (samples.size() < 2) throw DomainError("velocity from displacement needs >= 2 samples");
  std::vector<TimedValue> out;
  out.reserve(samples.size() - 1);
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double dt = samples[k + 1].time - samples[k].time;
    if (!(dt > 0.0)) throw DomainError("displacement timestamps must be strictly increasing");
    out.push_back({0.5 * (samples[k].time + samples[k + 1].time),
                   (samples[k + 1].displacement - samples[k].displacement) / dt});
  }
  return out;
}

std::vector<TimedValue> derive_velocity_from_accel(std::span<const TimedValue> accel, double v0) {
  if (accel.size() < 2) throw DomainError("velocity from acceleration needs >= 2 samples");
  std::vector<TimedValue> out;
  out.reserve(accel.size());
  out.push_back({accel.front().t, v0});
  for (std::size_t k = 1; k < accel.size(); ++k) {
    const double dt = accel[k].t - accel[k - 1].t;
    if (!(dt > 0.0)) throw DomainError("acceleration timestamps must be strictly increasing");
    out.push_back({accel[k].t, out.back().v + 0.5 * (accel[k].v + accel[k - 1].v) * dt});
  }
  return out;
}

double FusionModel::evaluate(double t) const {
  const double s = (t - time_origin) / time_scale;
  double v = 0.0;
  for (Eigen::Index i = coefficients.size() - 1; i >= 0; --i) v = v * s + coefficients[i];
  return v;
}

double FusionModel::peak_speed(std::size_t grid) const {
  double peak = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = t_start + (t_end - t_start) * static_cast<double>(i) / static_cast<double>(grid - 1);
    peak = std::max(peak, std::abs(evaluate(t)));
  }
  return peak;
}

FusionFit fit_velocity(std::span<const TimedValue> v_d, std::span<const TimedValue> v_a, int degree) {
  if (degree < 0) throw DomainError("polynomial degree must be non-negative");
  const std::size_t n = v_d.size() + v_a.size();
  const auto cols = static_cast<std::size_t>(degree) + 1;
  if (n < cols)
    throw DegenerateData("fusion needs at least " + std::to_string(cols) + " samples, got " +
                         std::to_string(n));

  double t_min = std::numeric_limits<double>::infinity();
  double t_max = -t_min;
  for (auto s : {v_d, v_a})
    for (const auto& p : s) {
      t_min = std::min(t_min, p.t);
      t_max = std::max(t_max, p.t);
    }
  if (!(t_max > t_min)) throw DegenerateData("fusion samples span zero time");

  FusionModel model;
  model.t_start = t_min;
  model.t_end = t_max;
  model.time_origin = 0.5 * (t_min + t_max);
  model.time_scale = 0.5 * (t_max - t_min);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
  Eigen::Index row = 0;
  for (auto s : {v_d, v_a})
    for (const auto& p : s) {
      const double x = (p.t - model.time_origin) / model.time_scale;
      double power = 1.0;
      for (std::size_t c = 0; c < cols; ++c) {
        design(row, static_cast<Eigen::Index>(c)) = power;
        power *= x;
      }
      rhs[row++] = p.v;
    }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(cols))
    throw DegenerateData("fusion design matrix is rank deficient (rank " +
                         std::to_string(qr.rank()) + " < " + std::to_string(cols) + ")");
  model.coefficients = qr.solve(rhs);

  FusionFit fit;
  fit.residuals = design * model.coefficients - rhs;
  fit.residual_rms = std::sqrt(fit.residuals.squaredNorm() / static_cast<double>(n));
  fit.n_displacement = v_d.size();
  fit.n_accel = v_a.size();
  fit.model = std::move(model);
  return fit;
}

std::vector<std::vector<MarkerDetection>> group_frames(std::span<const MarkerDetection> detections) {
  std::map<double, std::vector<MarkerDetection>> by_time;
  for (const auto& d : detections) by_time[d.time].push_back(d);
  std::vector<std::vector<MarkerDetection>> frames;
  frames.reserve(by_time.size());
  for (auto& [t, frame] : by_time) frames.push_back(std::move(frame));
  return frames;
}

std::vector<DisplacementSample> displacement_series(
    const std::vector<std::vector<MarkerDetection>>& frames,
    std::span<const MarkerDetection> reference, double sigma, const Eigen::Vector3d& bed_axis) {
  std::vector<DisplacementSample> out;
  out.reserve(frames.size());
  for (const auto& frame : frames) {
    try {
      out.push_back(bed_displacement(frame, reference, sigma, bed_axis));
    } catch (const OcclusionError&) {
    }
  }
  return out;
}

AccelStreamResult process_accel_stream(std::span<const AccelSample> samples,
                                       const Eigen::Vector3d& bed_axis,
                                       const std::optional<motion::FilterSpec>& lowpass, double v0) {
  if (samples.size() < 2) throw DomainError("accelerometer stream needs >= 2 samples");
  AccelStreamResult out;
  out.projected.reserve(samples.size());
  for (const auto& s : samples) {
    const auto a = accel_along_axis(s, bed_axis);
    if (a.misaligned && a.magnitude > 1e-9) ++out.misaligned_samples;
    out.projected.push_back({s.time, a.signed_accel});
  }
  if (lowpass) {
    const double dt = (samples.back().time - samples.front().time) /
                      static_cast<double>(samples.size() - 1);
    std::vector<double> values(out.projected.size());
    std::transform(out.projected.begin(), out.projected.end(), values.begin(),
                   [](const TimedValue& p) { return p.v; });
    const auto filtered = motion::apply_filter(values, dt, *lowpass);
    for (std::size_t i = 0; i < values.size(); ++i) out.projected[i].v = filtered[i];
  }
  out.velocity = derive_velocity_from_accel(out.projected, v0);
  return out;
}

}  // namespace shakebot::perception
