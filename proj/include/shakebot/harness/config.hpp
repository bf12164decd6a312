#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shakebot/actuation.hpp"
#include "shakebot/calibration.hpp"
#include "shakebot/rocking.hpp"

namespace shakebot::harness {

enum class OutcomeSource { Oracle, Manual };

struct SensorConfig {
  double camera_rate_hz = 30.0;
  double camera_phase_s = 0.0113;
  double marker_noise_m = 2e-4;
  int n_markers = 4;
  double imu_rate_hz = 200.0;
  double imu_phase_s = 0.0021;
  double imu_noise_ms2 = 0.02;
};

/// Parameters of the simulated plant that a real table would not expose.
struct SimulationConfig {
  double transmission_ratio = 1.0;  // actual / nominal travel per step
  double perception_scale = 1.0;    // true sigma of the synthetic camera
  double start_position = 0.2;      // m
  double rocking_dt = 1e-4;         // s
  double settle_time = 3.0;         // s after the pulse ends
};

struct ExperimentConfig {
  actuation::MotorSpec motor;
  actuation::Drivetrain drivetrain;
  double payload_mass = 4.0;       // kg
  double required_accel = 11.8;    // m/s^2
  double required_velocity = 0.5;  // m/s

  double sigma = 1.0;
  /// Measured bed travel per microstep; 0 means not yet calibrated.
  double meters_per_step = 0.0;

  double sample_rate_hz = 200.0;
  SensorConfig sensors;
  SimulationConfig sim;
  int fusion_degree = 6;
  bool perception = true;
  OutcomeSource outcome_source = OutcomeSource::Oracle;

  std::filesystem::path rock_path;  // empty: built-in test block
  std::vector<double> pga_grid;
  std::vector<double> kappa_grid;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError on out-of-range values, empty grids or missing files.
  void validate() const;
};

/// Default sweep grids, sized to stay inside the stroke and speed limits.
ExperimentConfig default_config();

/// Flat `key = value` text, `#` starts a comment. Unknown keys and malformed
/// values raise FormatError with the line number. Missing keys keep defaults.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, in a form parse_config accepts.
std::string serialize_config(const ExperimentConfig& config);

/// "start:stop:count" (inclusive, linear) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

/// Built-in symmetric test block: a slender 3 cm x 15 cm, 0.1 kg box.
rocking::RockSpec default_rock();
rocking::RockSpec load_rock(const std::filesystem::path& path);
void save_rock(const rocking::RockSpec& spec, const std::filesystem::path& path);
/// The configured rock, or the built-in block when no path is set.
rocking::RockSpec config_rock(const ExperimentConfig& config);

/// Calibration outcome persisted between CLI invocations.
struct CalibrationReport {
  std::optional<double> sigma;
  std::optional<double> gamma;  // drivetrain controller value
  std::optional<double> meters_per_step;
  double residual_rms = 0.0;
  std::size_t n_samples = 0;
};

void save_calibration(const CalibrationReport& report, const std::filesystem::path& path);
CalibrationReport load_calibration(const std::filesystem::path& path);
/// Copies whatever the report carries into the config.
void apply_calibration(ExperimentConfig& config, const CalibrationReport& report);

/// Shortest text that parses back to the same double.
std::string format_number(double value);

}  // namespace shakebot::harness
