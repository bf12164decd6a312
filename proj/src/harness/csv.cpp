#include "shakebot/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>

#include "shakebot/errors.hpp"
#include "shakebot/harness/config.hpp"

namespace shakebot::harness {

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Toppled:
      return "toppled";
    case Outcome::Balanced:
      return "balanced";
    case Outcome::Error:
      return "error";
  }
  return "error";
}

Outcome outcome_from(rocking::RockingResult result) {
  return result == rocking::RockingResult::Toppled ? Outcome::Toppled : Outcome::Balanced;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double cell_number(const std::string& cell, std::size_t line) {
  std::string t = cell;
  while (!t.empty() && (t.back() == '\r' || t.back() == ' ')) t.pop_back();
  std::size_t b = 0;
  while (b < t.size() && t[b] == ' ') ++b;
  double v = 0.0;
  const auto res = std::from_chars(t.data() + b, t.data() + t.size(), v);
  if (b == t.size() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw FormatError("expected a number, got '" + cell + "'", line);
  if (!std::isfinite(v)) throw FormatError("non-finite value '" + cell + "'", line);
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

/// Iterates numeric rows after checking the header; skips blank and `#` lines.
template <class RowHandler>
void read_numeric_csv(std::istream& in, const std::string& header, std::size_t columns,
                      RowHandler handle) {
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    raw = strip_cr(raw);
    if (raw.empty() || raw.front() == '#') continue;
    if (!have_header) {
      if (raw != header) throw FormatError("expected header '" + header + "'", line);
      have_header = true;
      continue;
    }
    const auto cells = split(raw);
    if (cells.size() != columns)
      throw FormatError("expected " + std::to_string(columns) + " columns, got " +
                            std::to_string(cells.size()),
                        line);
    std::vector<double> values;
    values.reserve(columns);
    for (const auto& c : cells) values.push_back(cell_number(c, line));
    handle(values, line);
  }
  if (!have_header) throw FormatError("missing header '" + header + "'", line + 1);
}

}  // namespace

std::string format_record(const ExperimentRecord& r) {
  std::string row = format_number(r.pga) + "," + format_number(r.kappa) + "," +
                    format_number(r.pgv) + "," + to_string(r.outcome) + ",";
  if (r.estimated_pgv) row += format_number(*r.estimated_pgv);
  row += "," + r.timestamp + "\n";
  return row;
}

std::vector<ExperimentRecord> read_records(std::istream& in) {
  std::vector<ExperimentRecord> out;
  std::string raw;
  std::size_t line = 1;
  if (!std::getline(in, raw) || strip_cr(raw) != kRecordsHeader)
    throw FormatError("expected records header", line);
  while (std::getline(in, raw)) {
    ++line;
    raw = strip_cr(raw);
    if (raw.empty()) continue;
    const auto c = split(raw);
    if (c.size() != 6) throw FormatError("expected 6 columns", line);
    ExperimentRecord r;
    r.pga = cell_number(c[0], line);
    r.kappa = cell_number(c[1], line);
    r.pgv = cell_number(c[2], line);
    if (c[3] == "toppled")
      r.outcome = Outcome::Toppled;
    else if (c[3] == "balanced")
      r.outcome = Outcome::Balanced;
    else if (c[3] == "error")
      r.outcome = Outcome::Error;
    else
      throw FormatError("unknown outcome '" + c[3] + "'", line);
    if (!c[4].empty()) r.estimated_pgv = cell_number(c[4], line);
    r.timestamp = c[5];
    out.push_back(r);
  }
  return out;
}

RecordWriter::RecordWriter(const std::filesystem::path& path) : path_(path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path_, ec) || std::filesystem::file_size(path_, ec) == 0;
  if (fresh) {
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path_.string());
    out << kRecordsHeader << "\n";
    out.flush();
  }
}

void RecordWriter::write(const ExperimentRecord& record) {
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot append to " + path_.string());
  out << format_record(record);
  out.flush();
}

std::string simulated_timestamp(double seconds) {
  // Session epoch 2024-01-01T00:00:00Z.
  const std::time_t epoch = 1704067200;
  const double whole = std::floor(seconds);
  const std::time_t t = epoch + static_cast<std::time_t>(whole);
  const int millis = static_cast<int>(std::lround((seconds - whole) * 1000.0)) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, millis);
  return buf;
}

void write_telemetry(const actuation::TelemetryLog& log, std::ostream& out) {
  out << "time_s,position_m,velocity_ms\n";
  for (const auto& s : log.samples)
    out << format_number(s.time) << "," << format_number(s.position) << ","
        << format_number(s.velocity) << "\n";
}

motion::SeismogramRecord read_seismogram(std::istream& in, const std::string& label) {
  std::vector<double> times;
  motion::SeismogramRecord rec;
  rec.label = label;
  read_numeric_csv(in, "time_s,accel_ms2", 2, [&](const std::vector<double>& v, std::size_t line) {
    if (times.size() >= 2) {
      const double dt0 = times[1] - times[0];
      const double step = v[0] - times.back();
      if (std::abs(step - dt0) > 1e-6)
        throw FormatError("non-uniform sample interval " + format_number(step) + " s (expected " +
                              format_number(dt0) + " s)",
                          line);
    } else if (times.size() == 1 && !(v[0] > times[0])) {
      throw FormatError("time must increase", line);
    }
    times.push_back(v[0]);
    rec.accel.push_back(v[1]);
  });
  if (times.size() < 2) throw FormatError("seismogram needs at least two samples", times.size() + 1);
  rec.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  return rec;
}

motion::SeismogramRecord read_seismogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_seismogram(in, path.filename().string());
}

void write_seismogram(const motion::SeismogramRecord& record, std::ostream& out) {
  out << "time_s,accel_ms2\n";
  for (std::size_t k = 0; k < record.accel.size(); ++k)
    out << format_number(static_cast<double>(k) * record.dt) << ","
        << format_number(record.accel[k]) << "\n";
}

std::vector<perception::MarkerDetection> read_markers(std::istream& in) {
  std::vector<perception::MarkerDetection> out;
  read_numeric_csv(in, "time_s,marker_id,qw,qx,qy,qz,tx,ty,tz", 9,
                   [&](const std::vector<double>& v, std::size_t line) {
                     perception::MarkerDetection d;
                     d.time = v[0];
                     d.marker_id = static_cast<int>(v[1]);
                     if (static_cast<double>(d.marker_id) != v[1])
                       throw FormatError("marker_id must be an integer", line);
                     const double qn = std::sqrt(v[2] * v[2] + v[3] * v[3] + v[4] * v[4] + v[5] * v[5]);
                     if (std::abs(qn - 1.0) > 1e-3) throw FormatError("quaternion is not unit length", line);
                     d.pose_in_camera = perception::Pose::from_quaternion(
                         v[2], v[3], v[4], v[5], Eigen::Vector3d(v[6], v[7], v[8]));
                     out.push_back(d);
                   });
  return out;
}

void write_markers(std::span<const perception::MarkerDetection> detections, std::ostream& out) {
  out << "time_s,marker_id,qw,qx,qy,qz,tx,ty,tz\n";
  for (const auto& d : detections) {
    const Eigen::Quaterniond q(d.pose_in_camera.rotation);
    const auto& t = d.pose_in_camera.translation;
    out << format_number(d.time) << "," << d.marker_id << "," << format_number(q.w()) << ","
        << format_number(q.x()) << "," << format_number(q.y()) << "," << format_number(q.z())
        << "," << format_number(t.x()) << "," << format_number(t.y()) << ","
        << format_number(t.z()) << "\n";
  }
}

std::vector<perception::AccelSample> read_accel(std::istream& in) {
  std::vector<perception::AccelSample> out;
  read_numeric_csv(in, "time_s,ax,ay,az", 4, [&](const std::vector<double>& v, std::size_t) {
    out.push_back({v[0], Eigen::Vector3d(v[1], v[2], v[3])});
  });
  return out;
}

void write_accel(std::span<const perception::AccelSample> samples, std::ostream& out) {
  out << "time_s,ax,ay,az\n";
  for (const auto& s : samples)
    out << format_number(s.time) << "," << format_number(s.accel.x()) << ","
        << format_number(s.accel.y()) << "," << format_number(s.accel.z()) << "\n";
}

}  // namespace shakebot::harness
