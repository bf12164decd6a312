#include "shakebot/harness/sensors.hpp"

#include <cmath>

#include "shakebot/errors.hpp"

namespace shakebot::harness {

namespace {

// Markers 0-3 sit on the bed corners about 1 m below the camera; any extra
// markers go on a row along the bed centre line.
Eigen::Vector3d marker_offset(int id) {
  if (id < 4) return {id % 2 ? 0.2 : -0.2, id / 2 ? 0.15 : -0.15, 1.0};
  return {0.05 * (id - 4), 0.0, 1.0};
}

}  // namespace

std::vector<perception::MarkerDetection> synth_frame(const CameraModel& model, double position,
                                                     double time, std::mt19937_64& rng) {
  const double sd = model.noise_m + model.relative_noise * std::abs(position - model.datum);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<perception::MarkerDetection> frame;
  frame.reserve(static_cast<std::size_t>(model.n_markers));
  for (int id = 0; id < model.n_markers; ++id) {
    Eigen::Vector3d t = marker_offset(id) + model.bed_axis * (position / model.true_sigma);
    if (sd > 0.0) t += sd * Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    frame.push_back({id, time, perception::Pose::from_translation(t)});
  }
  return frame;
}

std::vector<perception::MarkerDetection> synth_marker_stream(const actuation::TelemetryLog& log,
                                                             const CameraModel& model,
                                                             double t_begin, double t_end,
                                                             std::mt19937_64& rng) {
  if (!(model.rate_hz > 0.0)) throw DomainError("camera rate must be positive");
  std::vector<perception::MarkerDetection> out;
  const double period = 1.0 / model.rate_hz;
  const double first = t_begin + std::fmod(std::fmod(model.phase_s, period) + period, period);
  for (long k = 0;; ++k) {
    const double t = first + static_cast<double>(k) * period;
    if (t > t_end) break;
    const auto frame = synth_frame(model, log.position_at(t), t, rng);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

std::vector<perception::AccelSample> synth_accel_stream(const std::function<double(double)>& accel,
                                                        const ImuModel& model, double t_begin,
                                                        double t_end, std::mt19937_64& rng) {
  if (!(model.rate_hz > 0.0)) throw DomainError("accelerometer rate must be positive");
  std::normal_distribution<double> noise(0.0, model.noise_ms2);
  std::vector<perception::AccelSample> out;
  const double period = 1.0 / model.rate_hz;
  const double first = t_begin + std::fmod(std::fmod(model.phase_s, period) + period, period);
  for (long k = 0;; ++k) {
    const double t = first + static_cast<double>(k) * period;
    if (t > t_end) break;
    Eigen::Vector3d a = model.bed_axis * accel(t);
    if (model.noise_ms2 > 0.0) a += Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    out.push_back({t, a});
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined words.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace shakebot::harness
