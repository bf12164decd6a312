#include "shakebot/harness/interactive.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "shakebot/errors.hpp"
#include "shakebot/harness/csv.hpp"
#include "shakebot/harness/experiment.hpp"
#include "shakebot/harness/sensors.hpp"

namespace shakebot::harness {

namespace {

std::string lower_trimmed(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return t;
}

std::optional<std::string> read_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  return line;
}

bool parse_pair(const std::string& line, double& kappa, double& pga) {
  std::istringstream ss(line);
  std::string extra;
  return static_cast<bool>(ss >> kappa >> pga) && !(ss >> extra);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::size_t interactive_session(const ExperimentConfig& config, std::istream& in,
                                std::ostream& out, const std::filesystem::path& records_csv) {
  config.validate();
  const auto rock = config_rock(config);
  RecordWriter writer(records_csv);
  std::size_t written = 0;

  while (true) {
    out << "Enter PGV/PGA [s] and PGA [m/s^2] (q to quit): " << std::flush;
    const auto line = read_line(in);
    if (!line) break;
    const std::string cmd = lower_trimmed(*line);
    if (cmd == "q" || cmd == "quit" || cmd == "exit" || cmd == "n") break;
    if (cmd.empty()) continue;

    double kappa = 0.0, pga = 0.0;
    if (!parse_pair(*line, kappa, pga) || !(kappa > 0.0) || !(pga >= 0.0)) {
      out << "Could not read two numbers: PGV/PGA > 0 and PGA >= 0. Try again.\n";
      continue;
    }
    const auto report = actuation::feasibility_check(config.motor, config.drivetrain,
                                                     config.payload_mass, pga, pga * kappa);
    if (!report.ok()) {
      out << "Feasibility check failed: ";
      if (!report.accel_ok)
        out << "PGA " << fixed(pga, 3) << " exceeds achievable " << fixed(report.achievable_accel, 3)
            << " m/s^2. ";
      if (!report.velocity_ok)
        out << "PGV " << fixed(pga * kappa, 3) << " exceeds max belt speed "
            << fixed(report.max_belt_speed, 3) << " m/s. ";
      out << "Enter another motion.\n";
      continue;
    }

    out << "Place the rock on the bed. Running PGA " << fixed(pga, 3) << " m/s^2, PGV "
        << fixed(pga * kappa, 4) << " m/s.\n";
    RunArtifacts art;
    ExperimentRecord rec;
    try {
      rec = run_single(config, rock, pga, kappa, derive_seed(config.seed, written),
                       60.0 * static_cast<double>(written), &art);
    } catch (const MotionRejected& e) {
      out << "Feasibility check failed: " << e.what() << ". Enter another motion.\n";
      continue;
    }

    if (rec.estimated_pgv)
      out << "Estimated PGV " << fixed(*rec.estimated_pgv, 4) << " m/s (desired "
          << fixed(rec.pgv, 4) << ").\n";

    if (config.outcome_source == OutcomeSource::Oracle) {
      out << "Outcome (oracle): " << to_string(rec.outcome) << "\n";
    } else {
      bool entered = false;
      while (!entered) {
        out << "Overturning response [T]oppled / [B]alanced: " << std::flush;
        const auto answer = read_line(in);
        if (!answer) return written;
        const std::string a = lower_trimmed(*answer);
        if (a == "t" || a == "toppled") {
          rec.outcome = Outcome::Toppled;
          entered = true;
        } else if (a == "b" || a == "balanced") {
          rec.outcome = Outcome::Balanced;
          entered = true;
        }
      }
    }
    writer.write(rec);
    ++written;

    std::optional<bool> go_on;
    while (!go_on) {
      out << "Continue? [y/n]: " << std::flush;
      const auto answer = read_line(in);
      if (!answer) return written;
      const std::string a = lower_trimmed(*answer);
      if (a == "y" || a == "yes") go_on = true;
      if (a == "n" || a == "no") go_on = false;
    }
    if (!*go_on) break;
  }
  out << "Session closed, " << written << " record(s) in " << records_csv.string() << "\n";
  return written;
}

}  // namespace shakebot::harness
