#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "shakebot/driver.hpp"
#include "shakebot/harness/config.hpp"
#include "shakebot/harness/csv.hpp"
#include "shakebot/perception.hpp"
#include "shakebot/rocking.hpp"

namespace shakebot::harness {

/// Mock driver matching the configured rail, drivetrain and hidden transmission ratio.
actuation::MockDriverConfig mock_driver_config(const ExperimentConfig& config);

/// Synthetic sensor streams for one motion and what the fusion made of them.
struct MotionEstimate {
  std::vector<perception::MarkerDetection> markers;
  std::vector<perception::AccelSample> accel;
  std::vector<perception::TimedValue> v_d;
  std::vector<perception::TimedValue> v_a;
  std::optional<perception::FusionFit> fusion;  // empty when the streams are too short
  std::optional<double> estimated_pgv;
};

/// Cameras follow the telemetry, the accelerometer samples `bed_accel`; both
/// cover [t_begin, t_end]. Velocities are fitted over the same span.
MotionEstimate estimate_motion(const ExperimentConfig& config,
                               const actuation::TelemetryLog& telemetry,
                               const std::function<double(double)>& bed_accel, double t_begin,
                               double t_end, std::uint64_t seed);

struct RunArtifacts {
  motion::VelocityCommandSeries commands;
  actuation::TelemetryLog telemetry;
  MotionEstimate estimate;
  rocking::RockingResult oracle = rocking::RockingResult::Balanced;
};

/// Pulse -> commands -> step train -> mock driver -> synthetic sensors ->
/// fusion, with the outcome taken from the rocking oracle. `clock_s` is the
/// simulated session time used for the timestamp. MotionRejected from the
/// actuation layer propagates unchanged.
ExperimentRecord run_single(const ExperimentConfig& config, const rocking::RockSpec& rock,
                            double pga, double kappa, std::uint64_t seed, double clock_s,
                            RunArtifacts* artifacts = nullptr);

struct SweepResult {
  std::vector<double> pga_axis;
  std::vector<double> kappa_axis;
  /// Row-major by kappa, then pga; records[k * n_pga + p].
  std::vector<ExperimentRecord> records;
  /// Minimal toppling PGA per kappa from the grid, refined with the oracle
  /// where a balanced neighbour exists.
  std::vector<std::optional<double>> boundary;
  /// "non-increasing", "non-decreasing", "mixed" or "undetermined".
  std::string boundary_trend;

  Outcome outcome(std::size_t k, std::size_t p) const {
    return records[k * pga_axis.size() + p].outcome;
  }
};

/// Every grid cell through run_single (OpenMP-parallel, merged by grid index).
/// Cell failures become Outcome::Error records.
SweepResult run_sweep(const ExperimentConfig& config);
SweepResult run_sweep_serial(const ExperimentConfig& config);

/// records.csv, diagram.csv, boundary.csv, report.txt and config.txt.
void write_sweep(const ExperimentConfig& config, const SweepResult& result,
                 const std::filesystem::path& dir);

/// Writes the frozen effective config into dir/config.txt.
void write_config_echo(const ExperimentConfig& config, const std::filesystem::path& dir);

struct IngestResult {
  motion::VelocityCommandSeries commands;
  actuation::TelemetryLog telemetry;
  MotionEstimate estimate;
  double start_position = 0.0;
  double peak_displacement = 0.0;   // largest |position - start|
  double final_displacement = 0.0;  // position at the end - start
  double excursion = 0.0;           // max - min position, start included
};

/// Seismogram pipeline -> actuation on the mock driver -> perception.
IngestResult ingest_seismogram(const ExperimentConfig& config,
                               const motion::SeismogramRecord& record, std::uint64_t seed);

/// JSON summary of a fusion result.
void write_fusion_report(const MotionEstimate& estimate, std::ostream& out);

}  // namespace shakebot::harness
