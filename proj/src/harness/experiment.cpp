#include "shakebot/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>

#include <json.hpp>

#include "shakebot/errors.hpp"
#include "shakebot/harness/sensors.hpp"

namespace shakebot::harness {

actuation::MockDriverConfig mock_driver_config(const ExperimentConfig& config) {
  actuation::MockDriverConfig m;
  m.start_position = config.sim.start_position;
  m.travel_limit = config.drivetrain.travel_limit;
  m.calibration_left = 0.01;
  m.calibration_right = config.drivetrain.travel_limit - 0.01;
  m.nominal_meters_per_step = actuation::nominal_meters_per_step(config.motor, config.drivetrain);
  m.transmission_ratio = config.sim.transmission_ratio;
  return m;
}

namespace {

/// Ratio of the bed's true velocity to the commanded one.
double plant_gain(const ExperimentConfig& config) {
  return config.sim.transmission_ratio * config.drivetrain.gamma;
}

constexpr double kRunSpacing = 60.0;  // simulated seconds between runs
constexpr double kTail = 0.1;         // sensor capture past the motion, s

}  // namespace

MotionEstimate estimate_motion(const ExperimentConfig& config,
                               const actuation::TelemetryLog& telemetry,
                               const std::function<double(double)>& bed_accel, double t_begin,
                               double t_end, std::uint64_t seed) {
  CameraModel cam;
  cam.rate_hz = config.sensors.camera_rate_hz;
  cam.phase_s = config.sensors.camera_phase_s;
  cam.noise_m = config.sensors.marker_noise_m;
  cam.true_sigma = config.sim.perception_scale;
  cam.n_markers = config.sensors.n_markers;
  ImuModel imu;
  imu.rate_hz = config.sensors.imu_rate_hz;
  imu.phase_s = config.sensors.imu_phase_s;
  imu.noise_ms2 = config.sensors.imu_noise_ms2;

  std::mt19937_64 cam_rng(derive_seed(seed, 1));
  std::mt19937_64 imu_rng(derive_seed(seed, 2));

  MotionEstimate est;
  const auto reference = synth_frame(cam, telemetry.position_at(t_begin), t_begin, cam_rng);
  est.markers = synth_marker_stream(telemetry, cam, t_begin, t_end, cam_rng);
  est.accel = synth_accel_stream(bed_accel, imu, t_begin, t_end, imu_rng);

  const auto frames = perception::group_frames(est.markers);
  const auto disp = perception::displacement_series(frames, reference, config.sigma, cam.bed_axis);
  est.v_d = perception::derive_velocity_from_displacement(disp);
  if (!est.accel.empty())
    est.v_a = perception::process_accel_stream(est.accel, imu.bed_axis, std::nullopt, 0.0).velocity;

  const auto needed = static_cast<std::size_t>(config.fusion_degree) + 1;
  if (est.v_d.size() + est.v_a.size() >= needed) {
    try {
      est.fusion = perception::fit_velocity(est.v_d, est.v_a, config.fusion_degree);
      est.estimated_pgv = est.fusion->model.peak_speed();
    } catch (const DegenerateData&) {
      est.fusion.reset();
    }
  }
  return est;
}

ExperimentRecord run_single(const ExperimentConfig& config, const rocking::RockSpec& rock,
                            double pga, double kappa, std::uint64_t seed, double clock_s,
                            RunArtifacts* artifacts) {
  const auto pulse = motion::pulse_from_pga_kappa(pga, kappa, rock.gravity);
  ExperimentRecord rec;
  rec.pga = pga;
  rec.kappa = kappa;
  rec.pgv = pga * kappa;
  rec.timestamp = simulated_timestamp(clock_s);

  RunArtifacts local;
  RunArtifacts& art = artifacts ? *artifacts : local;
  art.commands = motion::sample_velocity_commands(pulse, config.sample_rate_hz);
  const auto train = actuation::commands_to_step_train(art.commands, config.motor, config.drivetrain);

  actuation::MockDriver driver(mock_driver_config(config));
  actuation::SafetyState safety;
  art.telemetry = actuation::execute(train, driver, safety, 0.0);
  if (!art.telemetry.completed)
    throw HardwareFault("motion stopped early: " + art.telemetry.events.back().detail);

  if (config.perception) {
    const double gain = plant_gain(config);
    art.estimate = estimate_motion(
        config, art.telemetry,
        [&](double t) { return t <= pulse.duration() ? gain * pulse.acceleration(t) : 0.0; }, 0.0,
        pulse.duration(), seed);
    rec.estimated_pgv = art.estimate.estimated_pgv;
  }

  rocking::DiagramOptions opts;
  opts.dt = config.sim.rocking_dt;
  opts.settle_time = config.sim.settle_time;
  art.oracle = rocking::simulate_pulse(rock, pga, kappa, opts);
  rec.outcome = outcome_from(art.oracle);
  return rec;
}

namespace {

ExperimentRecord run_cell(const ExperimentConfig& config, const rocking::RockSpec& rock,
                          double pga, double kappa, std::size_t index) {
  try {
    return run_single(config, rock, pga, kappa, derive_seed(config.seed, 1000 + index),
                      kRunSpacing * static_cast<double>(index));
  } catch (const Error& e) {
    ExperimentRecord rec;
    rec.pga = pga;
    rec.kappa = kappa;
    rec.pgv = pga * kappa;
    rec.outcome = Outcome::Error;
    rec.error = e.what();
    rec.timestamp = simulated_timestamp(kRunSpacing * static_cast<double>(index));
    return rec;
  }
}

std::string boundary_trend(const std::vector<std::optional<double>>& boundary) {
  std::vector<double> b;
  for (const auto& v : boundary)
    if (v) b.push_back(*v);
  if (b.size() < 2) return "undetermined";
  const bool down = std::is_sorted(b.rbegin(), b.rend());
  const bool up = std::is_sorted(b.begin(), b.end());
  if (down && !up) return "non-increasing";
  if (up && !down) return "non-decreasing";
  if (up && down) return "constant";
  return "mixed";
}

void finish_sweep(const ExperimentConfig& config, const rocking::RockSpec& rock, SweepResult& r) {
  rocking::DiagramOptions opts;
  opts.dt = config.sim.rocking_dt;
  opts.settle_time = config.sim.settle_time;
  const std::size_t np = r.pga_axis.size();
  r.boundary.assign(r.kappa_axis.size(), std::nullopt);
  for (std::size_t k = 0; k < r.kappa_axis.size(); ++k) {
    for (std::size_t p = 0; p < np; ++p) {
      if (r.outcome(k, p) != Outcome::Toppled) continue;
      if (p > 0 && r.outcome(k, p - 1) == Outcome::Balanced && r.pga_axis[p - 1] > 0.0)
        r.boundary[k] =
            rocking::refine_boundary(rock, r.kappa_axis[k], r.pga_axis[p - 1], r.pga_axis[p], opts);
      else
        r.boundary[k] = r.pga_axis[p];
      break;
    }
  }
  r.boundary_trend = boundary_trend(r.boundary);
}

SweepResult prepare_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepResult r;
  r.pga_axis = config.pga_grid;
  r.kappa_axis = config.kappa_grid;
  std::sort(r.pga_axis.begin(), r.pga_axis.end());
  r.records.resize(r.pga_axis.size() * r.kappa_axis.size());
  return r;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  SweepResult r = prepare_sweep(config);
  const auto rock = config_rock(config);
  const long n = static_cast<long>(r.records.size());
  const std::size_t np = r.pga_axis.size();
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    r.records[idx] = run_cell(config, rock, r.pga_axis[idx % np], r.kappa_axis[idx / np], idx);
  }
  finish_sweep(config, rock, r);
  return r;
}

SweepResult run_sweep_serial(const ExperimentConfig& config) {
  SweepResult r = prepare_sweep(config);
  const auto rock = config_rock(config);
  const std::size_t np = r.pga_axis.size();
  for (std::size_t i = 0; i < r.records.size(); ++i)
    r.records[i] = run_cell(config, rock, r.pga_axis[i % np], r.kappa_axis[i / np], i);
  finish_sweep(config, rock, r);
  return r;
}

void write_config_echo(const ExperimentConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "config.txt", std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / "config.txt").string());
  out << serialize_config(config);
}

namespace {

/// 1 toppled, 0 balanced, empty for a failed cell.
std::string diagram_cell(Outcome outcome) {
  if (outcome == Outcome::Error) return {};
  return outcome == Outcome::Toppled ? "1" : "0";
}

}  // namespace

void write_sweep(const ExperimentConfig& config, const SweepResult& r,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_config_echo(config, dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("records.csv");
    out << kRecordsHeader << "\n";
    for (const auto& rec : r.records) out << format_record(rec);
  }
  {
    auto out = open("diagram.csv");
    out << "kappa_s,pga_ms2,outcome\n";
    for (std::size_t k = 0; k < r.kappa_axis.size(); ++k)
      for (std::size_t p = 0; p < r.pga_axis.size(); ++p)
        out << format_number(r.kappa_axis[k]) << "," << format_number(r.pga_axis[p]) << ","
            << diagram_cell(r.outcome(k, p)) << "\n";
  }
  {
    auto out = open("boundary.csv");
    out << "kappa_s,pga_boundary_ms2\n";
    for (std::size_t k = 0; k < r.kappa_axis.size(); ++k) {
      out << format_number(r.kappa_axis[k]) << ",";
      if (r.boundary[k]) out << format_number(*r.boundary[k]);
      out << "\n";
    }
  }
  {
    auto out = open("report.txt");
    std::size_t toppled = 0, errors = 0;
    for (const auto& rec : r.records) {
      toppled += rec.outcome == Outcome::Toppled;
      errors += rec.outcome == Outcome::Error;
    }
    out << "cells = " << r.records.size() << "\n"
        << "toppled = " << toppled << "\n"
        << "errors = " << errors << "\n"
        << "boundary_trend = " << r.boundary_trend << "\n";
    for (const auto& rec : r.records)
      if (rec.outcome == Outcome::Error)
        out << "error kappa=" << format_number(rec.kappa) << " pga=" << format_number(rec.pga)
            << ": " << rec.error << "\n";
  }
}

IngestResult ingest_seismogram(const ExperimentConfig& config,
                               const motion::SeismogramRecord& record, std::uint64_t seed) {
  config.validate();
  IngestResult out;
  out.commands = motion::seismogram_to_commands(record, {}, config.sample_rate_hz);
  const auto train = actuation::commands_to_step_train(out.commands, config.motor, config.drivetrain);

  actuation::MockDriver driver(mock_driver_config(config));
  actuation::SafetyState safety;
  out.start_position = driver.position();
  out.telemetry = actuation::execute(train, driver, safety, 0.0);

  double lo = out.start_position, hi = out.start_position;
  for (const auto& s : out.telemetry.samples) {
    out.peak_displacement = std::max(out.peak_displacement, std::abs(s.position - out.start_position));
    lo = std::min(lo, s.position);
    hi = std::max(hi, s.position);
  }
  out.excursion = hi - lo;
  out.final_displacement = out.telemetry.samples.back().position - out.start_position;

  // The bed acceleration implied by linear interpolation of the commands.
  const auto& c = out.commands.commands;
  const double rate = out.commands.rate_hz;
  const double gain = plant_gain(config);
  auto bed_accel = [&](double t) {
    const double x = t * rate;
    if (x < 0.0 || c.size() < 2) return 0.0;
    const auto k = static_cast<std::size_t>(x);
    if (k + 1 >= c.size()) return 0.0;
    return gain * (c[k + 1] - c[k]) * rate;
  };
  if (config.perception)
    out.estimate = estimate_motion(config, out.telemetry, bed_accel, 0.0,
                                   out.commands.duration() + kTail, seed);
  return out;
}

void write_fusion_report(const MotionEstimate& estimate, std::ostream& out) {
  nlohmann::ordered_json j;
  j["n_marker_detections"] = estimate.markers.size();
  j["n_accel_samples"] = estimate.accel.size();
  j["n_displacement_velocities"] = estimate.v_d.size();
  j["n_accel_velocities"] = estimate.v_a.size();
  if (estimate.fusion) {
    const auto& f = *estimate.fusion;
    std::vector<double> coeffs(f.model.coefficients.data(),
                               f.model.coefficients.data() + f.model.coefficients.size());
    j["degree"] = f.model.degree();
    j["coefficients"] = coeffs;
    j["time_origin_s"] = f.model.time_origin;
    j["time_scale_s"] = f.model.time_scale;
    j["t_start_s"] = f.model.t_start;
    j["t_end_s"] = f.model.t_end;
    j["residual_rms_ms"] = f.residual_rms;
    j["estimated_pgv_ms"] = estimate.estimated_pgv.value_or(0.0);
  } else {
    j["degree"] = nullptr;
    j["estimated_pgv_ms"] = nullptr;
  }
  out << j.dump(2) << "\n";
}

}  // namespace shakebot::harness
