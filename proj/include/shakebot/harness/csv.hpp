#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shakebot/driver.hpp"
#include "shakebot/ground_motion.hpp"
#include "shakebot/perception.hpp"
#include "shakebot/rocking.hpp"

namespace shakebot::harness {

enum class Outcome { Toppled, Balanced, Error };

std::string to_string(Outcome outcome);
Outcome outcome_from(rocking::RockingResult result);

struct ExperimentRecord {
  double pga = 0.0;    // m/s^2
  double kappa = 0.0;  // s
  double pgv = 0.0;    // m/s
  Outcome outcome = Outcome::Balanced;
  std::optional<double> estimated_pgv;  // m/s, when perception ran
  std::string timestamp;                // ISO 8601, UTC
  std::string error;                    // message for Outcome::Error
};

inline constexpr const char* kRecordsHeader =
    "pga_ms2,kappa_s,pgv_ms,outcome,estimated_pgv_ms,timestamp_iso8601";

/// One CSV row, newline included.
std::string format_record(const ExperimentRecord& record);
std::vector<ExperimentRecord> read_records(std::istream& in);

/// Appends rows to a records file, writing the header first when the file is
/// new or empty. Each row is flushed as soon as it is written, so an
/// interrupted session never leaves a partial row.
class RecordWriter {
public:
  explicit RecordWriter(const std::filesystem::path& path);
  void write(const ExperimentRecord& record);

private:
  std::filesystem::path path_;
};

/// Seconds since the simulated session epoch as an ISO 8601 UTC timestamp.
std::string simulated_timestamp(double seconds);

void write_telemetry(const actuation::TelemetryLog& log, std::ostream& out);

/// time_s,accel_ms2 with a uniform sample interval (1e-6 s jitter tolerated).
/// Violations raise FormatError naming the line.
motion::SeismogramRecord read_seismogram(std::istream& in, const std::string& label = {});
motion::SeismogramRecord read_seismogram(const std::filesystem::path& path);
void write_seismogram(const motion::SeismogramRecord& record, std::ostream& out);

/// time_s,marker_id,qw,qx,qy,qz,tx,ty,tz
std::vector<perception::MarkerDetection> read_markers(std::istream& in);
void write_markers(std::span<const perception::MarkerDetection> detections, std::ostream& out);

/// time_s,ax,ay,az
std::vector<perception::AccelSample> read_accel(std::istream& in);
void write_accel(std::span<const perception::AccelSample> samples, std::ostream& out);

}  // namespace shakebot::harness
