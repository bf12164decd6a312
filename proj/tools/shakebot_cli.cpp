// Command-line front end for the shake-table stack.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shakebot/calibration.hpp"
#include "shakebot/driver.hpp"
#include "shakebot/errors.hpp"
#include "shakebot/harness/config.hpp"
#include "shakebot/harness/csv.hpp"
#include "shakebot/harness/experiment.hpp"
#include "shakebot/harness/interactive.hpp"
#include "shakebot/harness/sensors.hpp"
#include "shakebot/rocking.hpp"

namespace sb = shakebot;
namespace hn = shakebot::harness;

namespace {

struct CommonFlags {
  std::string config;
  std::string calibration;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> pga;
  std::optional<double> kappa;
  std::string rock;
  bool no_perception = false;
};

hn::ExperimentConfig effective_config(const CommonFlags& f) {
  auto c = f.config.empty() ? hn::default_config() : hn::load_config(f.config);
  if (!f.calibration.empty()) hn::apply_calibration(c, hn::load_calibration(f.calibration));
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.rock.empty()) c.rock_path = f.rock;
  if (f.no_perception) c.perception = false;
  c.validate();
  return c;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw sb::ConfigError("cannot write " + path.string());
  return out;
}

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw sb::ConfigError(std::string("missing required flag ") + flag);
  return *v;
}

hn::CameraModel camera_for(const hn::ExperimentConfig& c, double relative_noise) {
  hn::CameraModel cam;
  cam.noise_m = c.sensors.marker_noise_m;
  cam.relative_noise = relative_noise;
  cam.true_sigma = c.sim.perception_scale;
  cam.n_markers = c.sensors.n_markers;
  return cam;
}

int cmd_feasibility(const CommonFlags& flags, std::optional<double> mass, std::optional<double> accel,
                    std::optional<double> velocity) {
  const auto c = effective_config(flags);
  const auto r = sb::actuation::feasibility_check(c.motor, c.drivetrain, mass.value_or(c.payload_mass),
                                                  accel.value_or(c.required_accel),
                                                  velocity.value_or(c.required_velocity));
  const double g = sb::motion::kStandardGravity;
  std::cout << "force = " << fixed(r.force, 3) << " N\n"
            << "achievable_accel = " << fixed(r.achievable_accel, 3) << " m/s^2 ("
            << fixed(r.achievable_accel / g, 2) << " g)\n"
            << "required_accel = " << fixed(r.required_accel, 3) << " m/s^2\n"
            << "margin = " << fixed(r.accel_margin_ratio, 4) << "\n"
            << "rpm_limited_speed = " << fixed(r.rpm_limited_speed, 3) << " m/s\n"
            << "pulse_limited_speed = " << fixed(r.pulse_limited_speed, 3) << " m/s\n"
            << "max_belt_speed = " << fixed(r.max_belt_speed, 3) << " m/s\n"
            << "required_velocity = " << fixed(r.required_vel, 3) << " m/s\n"
            << "accel_ok = " << (r.accel_ok ? "true" : "false") << "\n"
            << "velocity_ok = " << (r.velocity_ok ? "true" : "false") << "\n";
  return r.ok() ? 0 : 3;
}

int cmd_pulse(const CommonFlags& flags) {
  const auto c = effective_config(flags);
  const double pga = require(flags.pga, "--pga");
  const double kappa = require(flags.kappa, "--kappa");
  hn::RunArtifacts art;
  const auto rec = hn::run_single(c, hn::config_rock(c), pga, kappa, c.seed, 0.0, &art);

  const auto& dir = c.output_dir;
  hn::write_config_echo(c, dir);
  hn::RecordWriter(dir / "records.csv").write(rec);
  {
    auto out = open_out(dir / "telemetry.csv");
    hn::write_telemetry(art.telemetry, out);
  }
  if (c.perception) {
    auto markers = open_out(dir / "markers.csv");
    hn::write_markers(art.estimate.markers, markers);
    auto accel = open_out(dir / "accel.csv");
    hn::write_accel(art.estimate.accel, accel);
    auto fusion = open_out(dir / "fusion.json");
    hn::write_fusion_report(art.estimate, fusion);
  }
  std::cout << "pga = " << hn::format_number(rec.pga) << " m/s^2\n"
            << "kappa = " << hn::format_number(rec.kappa) << " s\n"
            << "pgv = " << hn::format_number(rec.pgv) << " m/s\n"
            << "pulses = " << art.telemetry.samples.size() - 1 << "\n";
  if (rec.estimated_pgv) std::cout << "estimated_pgv = " << fixed(*rec.estimated_pgv, 5) << " m/s\n";
  std::cout << "outcome = " << hn::to_string(rec.outcome) << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags) {
  const auto c = effective_config(flags);
  const auto result = hn::run_sweep(c);
  hn::write_sweep(c, result, c.output_dir);
  std::size_t toppled = 0, errors = 0;
  for (const auto& r : result.records) {
    toppled += r.outcome == hn::Outcome::Toppled;
    errors += r.outcome == hn::Outcome::Error;
  }
  std::cout << "cells = " << result.records.size() << "\n"
            << "toppled = " << toppled << "\n"
            << "errors = " << errors << "\n"
            << "boundary_trend = " << result.boundary_trend << "\n"
            << "output = " << c.output_dir.string() << "\n";
  return 0;
}

int cmd_interactive(const CommonFlags& flags) {
  const auto c = effective_config(flags);
  hn::write_config_echo(c, c.output_dir);
  hn::interactive_session(c, std::cin, std::cout, c.output_dir / "records.csv");
  return 0;
}

int cmd_calibrate_perception(const CommonFlags& flags, int points, double relative_noise) {
  const auto c = effective_config(flags);
  sb::actuation::MockDriver driver(hn::mock_driver_config(c));
  auto cam = camera_for(c, relative_noise);
  cam.datum = driver.config().calibration_left;
  hn::SyntheticCamera camera(driver, cam, hn::derive_seed(c.seed, 7));
  sb::calibration::PerceptionCalibrationOptions opts;
  const auto mock = hn::mock_driver_config(c);
  opts.measured_stroke = mock.calibration_right - mock.calibration_left;
  opts.n_random_points = points;
  opts.seed = c.seed;
  const auto cal = sb::calibration::run_perception_calibration(driver, camera, opts);

  hn::CalibrationReport report;
  report.sigma = cal.sigma.factor;
  report.meters_per_step = cal.meters_per_step;
  report.residual_rms = cal.sigma.residual_rms;
  report.n_samples = cal.sigma.n_samples;
  std::filesystem::create_directories(c.output_dir);
  hn::save_calibration(report, c.output_dir / "calibration_perception.txt");
  std::cout << "sigma = " << fixed(cal.sigma.factor, 6) << "\n"
            << "meters_per_step = " << hn::format_number(cal.meters_per_step) << "\n"
            << "stroke_steps = " << cal.stroke_steps << "\n"
            << "residual_rms = " << hn::format_number(cal.sigma.residual_rms) << " m\n"
            << "n_samples = " << cal.sigma.n_samples << "\n";
  return 0;
}

int cmd_calibrate_gamma(const CommonFlags& flags, int trials, double relative_noise) {
  const auto c = effective_config(flags);
  sb::actuation::MockDriver driver(hn::mock_driver_config(c));
  hn::SyntheticCamera camera(driver, camera_for(c, relative_noise), hn::derive_seed(c.seed, 8));
  sb::actuation::SafetyState safety;
  sb::calibration::GammaCalibrationOptions opts;
  opts.n_trials = trials;
  opts.sigma = c.sigma;
  opts.seed = c.seed;
  const auto cal =
      sb::calibration::run_gamma_calibration(driver, camera, c.motor, c.drivetrain, safety, opts);
  const auto drivetrain = sb::calibration::apply_gamma(c.drivetrain, cal.gamma);

  hn::CalibrationReport report;
  report.gamma = drivetrain.gamma;
  report.residual_rms = cal.gamma.residual_rms;
  report.n_samples = cal.gamma.n_samples;
  std::filesystem::create_directories(c.output_dir);
  hn::save_calibration(report, c.output_dir / "calibration_gamma.txt");
  std::cout << "transmission_ratio = " << fixed(cal.gamma.factor, 6) << "\n"
            << "gamma = " << fixed(drivetrain.gamma, 6) << "\n"
            << "residual_rms = " << hn::format_number(cal.gamma.residual_rms) << " m\n"
            << "n_samples = " << cal.gamma.n_samples << "\n";
  return 0;
}

int cmd_seismogram(const CommonFlags& flags, const std::string& path) {
  const auto c = effective_config(flags);
  const auto record = hn::read_seismogram(std::filesystem::path(path));
  const auto result = hn::ingest_seismogram(c, record, c.seed);

  hn::write_config_echo(c, c.output_dir);
  {
    auto out = open_out(c.output_dir / "telemetry.csv");
    hn::write_telemetry(result.telemetry, out);
  }
  if (c.perception) {
    auto out = open_out(c.output_dir / "fusion.json");
    hn::write_fusion_report(result.estimate, out);
  }
  std::cout << "samples = " << record.accel.size() << "\n"
            << "commands = " << result.commands.commands.size() << "\n"
            << "peak_displacement = " << fixed(result.peak_displacement, 6) << " m\n"
            << "final_displacement = " << fixed(result.final_displacement, 6) << " m\n"
            << "excursion = " << fixed(result.excursion, 6) << " m\n"
            << "commanded_peak_speed = " << fixed(result.commands.peak_speed(), 5) << " m/s\n";
  if (result.estimate.estimated_pgv)
    std::cout << "estimated_pgv = " << fixed(*result.estimate.estimated_pgv, 5) << " m/s\n";
  if (result.telemetry.soft_stopped()) std::cout << "soft_stop = true\n";
  return 0;
}

int cmd_diagram(const CommonFlags& flags, int polarity, bool serial) {
  const auto c = effective_config(flags);
  const auto rock = hn::config_rock(c);
  sb::rocking::DiagramOptions opts;
  opts.dt = c.sim.rocking_dt;
  opts.settle_time = c.sim.settle_time;
  opts.polarity = polarity;
  std::vector<double> pga = c.pga_grid;
  std::erase_if(pga, [](double p) { return p <= 0.0; });
  std::sort(pga.begin(), pga.end());
  const auto d = serial ? sb::rocking::response_diagram_serial(rock, pga, c.kappa_grid, opts)
                        : sb::rocking::response_diagram(rock, pga, c.kappa_grid, opts);

  std::filesystem::create_directories(c.output_dir);
  hn::write_config_echo(c, c.output_dir);
  auto out = open_out(c.output_dir / "diagram.csv");
  out << "kappa_s,pga_ms2,outcome\n";
  for (std::size_t k = 0; k < d.kappa_axis.size(); ++k)
    for (std::size_t p = 0; p < d.pga_axis.size(); ++p)
      out << hn::format_number(d.kappa_axis[k]) << "," << hn::format_number(d.pga_axis[p]) << ","
          << (d.outcomes[k][p] == sb::rocking::RockingResult::Toppled ? 1 : 0) << "\n";
  auto bout = open_out(c.output_dir / "boundary.csv");
  bout << "kappa_s,pga_boundary_ms2\n";
  for (std::size_t k = 0; k < d.kappa_axis.size(); ++k) {
    bout << hn::format_number(d.kappa_axis[k]) << ",";
    if (d.boundary[k]) bout << hn::format_number(*d.boundary[k]);
    bout << "\n";
    std::cout << "kappa = " << fixed(d.kappa_axis[k], 4) << "  boundary = "
              << (d.boundary[k] ? fixed(*d.boundary[k], 4) + " m/s^2" : std::string("none")) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shake-table control, perception and rocking-experiment toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonFlags flags;
  app.add_option("--config", flags.config, "Experiment config file (key = value)");
  app.add_option("--calibration", flags.calibration, "Calibration report to apply");
  app.add_option("--seed", flags.seed, "Random seed");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--pga", flags.pga, "Peak ground acceleration, m/s^2");
  app.add_option("--kappa", flags.kappa, "PGV/PGA, s");
  app.add_option("--rock", flags.rock, "Rock spec file");
  app.add_flag("--no-perception", flags.no_perception, "Skip synthetic sensors and fusion");

  std::optional<double> mass, accel, velocity;
  auto* feas = app.add_subcommand("feasibility", "Motor sizing check");
  feas->add_option("--mass", mass, "Total moving mass, kg");
  feas->add_option("--accel", accel, "Required acceleration, m/s^2");
  feas->add_option("--velocity", velocity, "Required velocity, m/s");

  auto* pulse = app.add_subcommand("pulse", "Run one single-pulse cosine experiment");
  auto* sweep = app.add_subcommand("sweep", "Run the configured (PGA, kappa) grid");
  auto* inter = app.add_subcommand("interactive", "Prompt-driven experiment session");

  int points = 50, trials = 20;
  double cal_noise = 0.0;
  auto* calp = app.add_subcommand("calibrate-perception", "Estimate sigma and meters per step");
  calp->add_option("--points", points, "Random calibration positions")->check(CLI::PositiveNumber);
  calp->add_option("--relative-noise", cal_noise, "Marker noise proportional to displacement");
  auto* calg = app.add_subcommand("calibrate-gamma", "Estimate the transmission factor");
  calg->add_option("--trials", trials, "Half-cosine trials")->check(CLI::PositiveNumber);
  calg->add_option("--relative-noise", cal_noise, "Marker noise proportional to displacement");

  std::string seismo_path;
  auto* seis = app.add_subcommand("seismogram", "Replay an accelerogram (time_s,accel_ms2 CSV)");
  seis->add_option("path", seismo_path, "Accelerogram CSV")->required();

  int polarity = 1;
  bool serial = false;
  auto* diag = app.add_subcommand("diagram", "Rocking-oracle response diagram only");
  diag->add_option("--polarity", polarity, "+1 or -1 pulse direction")->check(CLI::IsMember({-1, 1}));
  diag->add_flag("--serial", serial, "Use the single-threaded reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*feas) return cmd_feasibility(flags, mass, accel, velocity);
    if (*pulse) return cmd_pulse(flags);
    if (*sweep) return cmd_sweep(flags);
    if (*inter) return cmd_interactive(flags);
    if (*calp) return cmd_calibrate_perception(flags, points, cal_noise);
    if (*calg) return cmd_calibrate_gamma(flags, trials, cal_noise);
    if (*seis) return cmd_seismogram(flags, seismo_path);
    if (*diag) return cmd_diagram(flags, polarity, serial);
  } catch (const sb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sb::DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const sb::MotionRejected& e) {
    std::cerr << "motion rejected: " << e.what() << "\n";
    return 3;
  } catch (const sb::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
