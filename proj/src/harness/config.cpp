#include "shakebot/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "shakebot/errors.hpp"

namespace shakebot::harness {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& key, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw FormatError("'" + key + "' expects a number, got '" + t + "'", line);
  return v;
}

long to_long(const std::string& text, const std::string& key, std::size_t line) {
  const std::string t = trim(text);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size())
    throw FormatError("'" + key + "' expects an integer, got '" + t + "'", line);
  return v;
}

bool to_bool(const std::string& text, const std::string& key, std::size_t line) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw FormatError("'" + key + "' expects true or false, got '" + t + "'", line);
}

std::string join_grid(const std::vector<double>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ',';
    out += format_number(grid[i]);
  }
  return out;
}

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const std::string&, std::size_t)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define SB_NUMBER(name, member)                                                              \
  Field {                                                                                    \
    name, [](ExperimentConfig& c, const std::string& v, std::size_t l) {                     \
      c.member = to_double(v, name, l);                                                      \
    },                                                                                       \
        [](const ExperimentConfig& c) { return format_number(c.member); }                    \
  }

#define SB_INTEGER(name, member)                                                             \
  Field {                                                                                    \
    name, [](ExperimentConfig& c, const std::string& v, std::size_t l) {                     \
      c.member = static_cast<decltype(c.member)>(to_long(v, name, l));                       \
    },                                                                                       \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      SB_NUMBER("motor_torque_nm", motor.torque_at_max_speed),
      SB_NUMBER("motor_max_rpm", motor.max_speed_rpm),
      SB_INTEGER("motor_full_steps", motor.full_steps_per_rev),
      SB_INTEGER("motor_microsteps", motor.microsteps_per_rev),
      SB_NUMBER("pulley_radius_m", drivetrain.pulley_radius),
      SB_NUMBER("gamma", drivetrain.gamma),
      SB_NUMBER("travel_limit_m", drivetrain.travel_limit),
      SB_NUMBER("max_pulse_rate_hz", drivetrain.max_pulse_rate_hz),
      SB_NUMBER("payload_mass_kg", payload_mass),
      SB_NUMBER("required_accel_ms2", required_accel),
      SB_NUMBER("required_velocity_ms", required_velocity),
      SB_NUMBER("sigma", sigma),
      SB_NUMBER("meters_per_step", meters_per_step),
      SB_NUMBER("sample_rate_hz", sample_rate_hz),
      SB_NUMBER("camera_rate_hz", sensors.camera_rate_hz),
      SB_NUMBER("camera_phase_s", sensors.camera_phase_s),
      SB_NUMBER("marker_noise_m", sensors.marker_noise_m),
      SB_INTEGER("n_markers", sensors.n_markers),
      SB_NUMBER("imu_rate_hz", sensors.imu_rate_hz),
      SB_NUMBER("imu_phase_s", sensors.imu_phase_s),
      SB_NUMBER("imu_noise_ms2", sensors.imu_noise_ms2),
      SB_NUMBER("sim_transmission_ratio", sim.transmission_ratio),
      SB_NUMBER("sim_perception_scale", sim.perception_scale),
      SB_NUMBER("sim_start_position_m", sim.start_position),
      SB_NUMBER("rocking_dt_s", sim.rocking_dt),
      SB_NUMBER("settle_time_s", sim.settle_time),
      SB_INTEGER("fusion_degree", fusion_degree),
      {"perception",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.perception = to_bool(v, "perception", l);
       },
       [](const ExperimentConfig& c) { return std::string(c.perception ? "true" : "false"); }},
      {"outcome_source",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         const auto t = trim(v);
         if (t == "oracle")
           c.outcome_source = OutcomeSource::Oracle;
         else if (t == "manual")
           c.outcome_source = OutcomeSource::Manual;
         else
           throw FormatError("'outcome_source' expects oracle or manual, got '" + t + "'", l);
       },
       [](const ExperimentConfig& c) {
         return std::string(c.outcome_source == OutcomeSource::Oracle ? "oracle" : "manual");
       }},
      {"rock", [](ExperimentConfig& c, const std::string& v, std::size_t) { c.rock_path = trim(v); },
       [](const ExperimentConfig& c) { return c.rock_path.string(); }},
      {"pga_grid",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         try {
           c.pga_grid = parse_grid(v);
         } catch (const ConfigError& e) {
           throw FormatError(e.what(), l);
         }
       },
       [](const ExperimentConfig& c) { return join_grid(c.pga_grid); }},
      {"kappa_grid",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         try {
           c.kappa_grid = parse_grid(v);
         } catch (const ConfigError& e) {
           throw FormatError(e.what(), l);
         }
       },
       [](const ExperimentConfig& c) { return join_grid(c.kappa_grid); }},
      SB_INTEGER("seed", seed),
      {"output_dir",
       [](ExperimentConfig& c, const std::string& v, std::size_t) { c.output_dir = trim(v); },
       [](const ExperimentConfig& c) { return c.output_dir.string(); }},
  };
  return table;
}

#undef SB_NUMBER
#undef SB_INTEGER

/// Reads `key = value` lines, calling `handle` for each.
template <class Handler>
void read_key_values(std::istream& in, Handler handle) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw FormatError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw FormatError("missing key before '='", line);
    handle(key, trim(text.substr(eq + 1)), line);
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("grid is empty");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("range grid must be start:stop:count");
    const double a = to_double(parts[0], "grid", 0);
    const double b = to_double(parts[1], "grid", 0);
    const long n = to_long(parts[2], "grid", 0);
    if (n < 1) throw ConfigError("range grid count must be at least 1");
    if (n == 1) return {a};
    for (long i = 0; i < n; ++i)
      out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
  }
  std::stringstream ss(t);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p, "grid", 0));
  return out;
}

void ExperimentConfig::validate() const {
  try {
    motor.validate();
    drivetrain.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(payload_mass, "payload_mass_kg");
  positive(sigma, "sigma");
  positive(sample_rate_hz, "sample_rate_hz");
  positive(sensors.camera_rate_hz, "camera_rate_hz");
  positive(sensors.imu_rate_hz, "imu_rate_hz");
  positive(sim.transmission_ratio, "sim_transmission_ratio");
  positive(sim.perception_scale, "sim_perception_scale");
  positive(sim.rocking_dt, "rocking_dt_s");
  if (meters_per_step < 0.0) throw ConfigError("meters_per_step must not be negative");
  if (sensors.marker_noise_m < 0.0 || sensors.imu_noise_ms2 < 0.0)
    throw ConfigError("sensor noise levels must not be negative");
  if (sensors.n_markers < 1) throw ConfigError("n_markers must be at least 1");
  if (fusion_degree < 1 || fusion_degree > 12) throw ConfigError("fusion_degree must lie in [1, 12]");
  if (sim.settle_time < 0.0) throw ConfigError("settle_time_s must not be negative");
  if (sim.start_position < 0.0 || sim.start_position > drivetrain.travel_limit)
    throw ConfigError("sim_start_position_m must lie on the rail");
  if (pga_grid.empty() || kappa_grid.empty()) throw ConfigError("sweep grids must be non-empty");
  for (double p : pga_grid)
    if (!(p >= 0.0)) throw ConfigError("pga_grid entries must be non-negative");
  for (double k : kappa_grid)
    if (!(k > 0.0)) throw ConfigError("kappa_grid entries must be positive");
  if (!rock_path.empty() && !std::filesystem::exists(rock_path))
    throw ConfigError("rock file " + rock_path.string() + " does not exist");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.pga_grid = parse_grid("0.5:4:10");
  c.kappa_grid = parse_grid("0.03:0.12:10");
  return c;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c = default_config();
  const auto& table = fields();
  read_key_values(in, [&](const std::string& key, const std::string& value, std::size_t line) {
    for (const auto& f : table)
      if (key == f.key) {
        f.set(c, value, line);
        return;
      }
    throw FormatError("unknown key '" + key + "'", line);
  });
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto c = parse_config(in);
  // Relative rock paths are resolved against the config's directory.
  if (!c.rock_path.empty() && c.rock_path.is_relative())
    c.rock_path = path.parent_path() / c.rock_path;
  return c;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(config) + "\n";
  return out;
}

rocking::RockSpec default_rock() { return rocking::block_from_box(0.03, 0.15, 0.1); }

rocking::RockSpec load_rock(const std::filesystem::path& path) {
  auto in = open_input(path);
  rocking::RockSpec s;
  const std::vector<std::pair<const char*, double*>> keys = {
      {"alpha_pos_rad", &s.alpha_pos}, {"alpha_neg_rad", &s.alpha_neg}, {"R_pos_m", &s.radius_pos},
      {"R_neg_m", &s.radius_neg},      {"mass_kg", &s.mass},              {"I_pos", &s.inertia_pos},
      {"I_neg", &s.inertia_neg},       {"e", &s.restitution},             {"g_ms2", &s.gravity},
  };
  read_key_values(in, [&](const std::string& key, const std::string& value, std::size_t line) {
    for (const auto& [name, target] : keys)
      if (key == name) {
        *target = to_double(value, key, line);
        return;
      }
    throw FormatError("unknown rock key '" + key + "'", line);
  });
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return s;
}

void save_rock(const rocking::RockSpec& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "alpha_pos_rad=" << format_number(s.alpha_pos) << "\n"
      << "alpha_neg_rad=" << format_number(s.alpha_neg) << "\n"
      << "R_pos_m=" << format_number(s.radius_pos) << "\n"
      << "R_neg_m=" << format_number(s.radius_neg) << "\n"
      << "mass_kg=" << format_number(s.mass) << "\n"
      << "I_pos=" << format_number(s.inertia_pos) << "\n"
      << "I_neg=" << format_number(s.inertia_neg) << "\n"
      << "e=" << format_number(s.restitution) << "\n";
  if (s.gravity != motion::kStandardGravity) out << "g_ms2=" << format_number(s.gravity) << "\n";
}

rocking::RockSpec config_rock(const ExperimentConfig& config) {
  return config.rock_path.empty() ? default_rock() : load_rock(config.rock_path);
}

void save_calibration(const CalibrationReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  if (r.sigma) out << "sigma=" << format_number(*r.sigma) << "\n";
  if (r.gamma) out << "gamma=" << format_number(*r.gamma) << "\n";
  if (r.meters_per_step) out << "meters_per_step=" << format_number(*r.meters_per_step) << "\n";
  out << "residual_rms=" << format_number(r.residual_rms) << "\n";
  out << "n_samples=" << r.n_samples << "\n";
}

CalibrationReport load_calibration(const std::filesystem::path& path) {
  auto in = open_input(path);
  CalibrationReport r;
  read_key_values(in, [&](const std::string& key, const std::string& value, std::size_t line) {
    if (key == "sigma")
      r.sigma = to_double(value, key, line);
    else if (key == "gamma")
      r.gamma = to_double(value, key, line);
    else if (key == "meters_per_step")
      r.meters_per_step = to_double(value, key, line);
    else if (key == "residual_rms")
      r.residual_rms = to_double(value, key, line);
    else if (key == "n_samples")
      r.n_samples = static_cast<std::size_t>(to_long(value, key, line));
    else
      throw FormatError("unknown calibration key '" + key + "'", line);
  });
  return r;
}

void apply_calibration(ExperimentConfig& config, const CalibrationReport& report) {
  if (report.sigma) config.sigma = *report.sigma;
  if (report.gamma) config.drivetrain.gamma = *report.gamma;
  if (report.meters_per_step) config.meters_per_step = *report.meters_per_step;
}

}  // namespace shakebot::harness
