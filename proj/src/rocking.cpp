#include "shakebot/rocking.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shakebot/errors.hpp"

namespace shakebot::rocking {

void RockSpec::validate() const {
  const double half_pi = 0.5 * std::numbers::pi;
  if (!(alpha_pos > 0.0 && alpha_pos < half_pi) || !(alpha_neg > 0.0 && alpha_neg < half_pi))
    throw DomainError("slenderness angles must lie in (0, pi/2)");
  if (!(radius_pos > 0.0) || !(radius_neg > 0.0)) throw DomainError("edge radii must be positive");
  if (!(mass > 0.0) || !(inertia_pos > 0.0) || !(inertia_neg > 0.0))
    throw DomainError("mass and inertia must be positive");
  if (!(restitution > 0.0 && restitution <= 1.0))
    throw DomainError("restitution must lie in (0, 1]");
  if (!(gravity > 0.0)) throw DomainError("gravity must be positive");
}

double RockSpec::p_squared(int side) const {
  return side > 0 ? mass * gravity * radius_pos / inertia_pos
                  : mass * gravity * radius_neg / inertia_neg;
}

RockSpec RockSpec::mirrored() const {
  RockSpec m = *this;
  std::swap(m.alpha_pos, m.alpha_neg);
  std::swap(m.radius_pos, m.radius_neg);
  std::swap(m.inertia_pos, m.inertia_neg);
  return m;
}

RockSpec RockSpec::scaled(double s) const {
  RockSpec m = *this;
  m.radius_pos *= s;
  m.radius_neg *= s;
  m.inertia_pos *= s * s;
  m.inertia_neg *= s * s;
  return m;
}

double housner_restitution(double alpha) {
  const double s = std::sin(alpha);
  const double e = 1.0 - 1.5 * s * s;
  return e * e;
}

RockSpec block_from_box(double width, double height, double mass, std::optional<double> restitution,
                        double gravity) {
  if (!(width > 0.0) || !(height > 0.0) || !(mass > 0.0))
    throw DomainError("block dimensions and mass must be positive");
  RockSpec spec;
  spec.alpha_pos = spec.alpha_neg = std::atan2(0.5 * width, 0.5 * height);
  spec.radius_pos = spec.radius_neg = std::hypot(0.5 * width, 0.5 * height);
  spec.mass = mass;
  // Second moment of a uniform rectangle about a base corner.
  spec.inertia_pos = spec.inertia_neg = mass * (width * width + height * height) / 3.0;
  spec.restitution = restitution.value_or(housner_restitution(spec.alpha_pos));
  spec.gravity = gravity;
  spec.validate();
  return spec;
}

double uplift_threshold(const RockSpec& spec, int side) {
  return spec.gravity * std::tan(spec.alpha(side));
}

namespace {

struct State {
  double theta;
  double omega;
};

class Integrator {
public:
  Integrator(const RockSpec& spec, std::span<const double> accel, double dt)
      : spec_(spec), accel_(accel), dt_(dt) {}

  double ground(double t) const {
    if (accel_.empty() || t < 0.0) return 0.0;
    const double x = t / dt_;
    const auto i = static_cast<std::size_t>(x);
    if (i >= accel_.size()) return 0.0;
    const double next = i + 1 < accel_.size() ? accel_[i + 1] : 0.0;
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * accel_[i] + w * next;
  }

  double excitation_end() const { return dt_ * static_cast<double>(accel_.size()); }

  State rk4(State y, double t, double h, int side) const {
    auto f = [&](const State& s, double time) {
      const double phi = side * spec_.alpha(side) - s.theta;
      const double alpha_dd =
          -spec_.p_squared(side) * (std::sin(phi) + ground(time) / spec_.gravity * std::cos(phi));
      return State{s.omega, alpha_dd};
    };
    const State k1 = f(y, t);
    const State k2 = f({y.theta + 0.5 * h * k1.theta, y.omega + 0.5 * h * k1.omega}, t + 0.5 * h);
    const State k3 = f({y.theta + 0.5 * h * k2.theta, y.omega + 0.5 * h * k2.omega}, t + 0.5 * h);
    const State k4 = f({y.theta + h * k3.theta, y.omega + h * k3.omega}, t + h);
    return {y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            y.omega + h / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega)};
  }

  /// Smallest sub-step h in (0, h_max] with g(rk4(y, t, h)) >= 0, given g < 0 at
  /// h = 0 side of the bracket and g >= 0 at h_max.
  template <class G>
  double locate(State y, double t, double h_max, int side, G g) const {
    double lo = 0.0, hi = h_max;
    for (int i = 0; i < 60 && hi - lo > 1e-14 * dt_; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (g(rk4(y, t, mid, side)) >= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

private:
  const RockSpec& spec_;
  std::span<const double> accel_;
  double dt_;
};

int side_of(RockingMode mode) { return mode == RockingMode::RockingPos ? 1 : -1; }

RockingMode mode_of(int side) { return side > 0 ? RockingMode::RockingPos : RockingMode::RockingNeg; }

}  // namespace

RockingOutcome simulate_rocking(const RockSpec& spec, std::span<const double> ground_accel,
                                double dt, const SimulationOptions& options) {
  spec.validate();
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  for (double a : ground_accel)
    if (!std::isfinite(a)) throw DomainError("ground acceleration contains non-finite samples");

  const Integrator integ(spec, ground_accel, dt);
  const double half_pi = 0.5 * std::numbers::pi;
  const double p_max = std::sqrt(std::max(spec.p_squared(1), spec.p_squared(-1)));
  const double floor = options.rest_floor * p_max;

  RockingOutcome out;
  RockingMode mode = RockingMode::Rest;
  State y{0.0, 0.0};
  if (options.initial && options.initial->mode != RockingMode::Rest) {
    mode = options.initial->mode;
    y = {options.initial->theta, options.initial->theta_dot};
    out.uplifted = true;
  }

  double t = 0.0;
  auto record = [&] {
    if (options.record_trajectory) out.trajectory.push_back({t, y.theta, y.omega});
  };
  auto note_peak = [&](const State& s, int side) {
    out.peak_tilt_ratio = std::max(out.peak_tilt_ratio, std::abs(s.theta) / spec.alpha(side));
  };
  record();

  const double end = options.max_time;
  while (t < end - 1e-12 * dt) {
    const double h = std::min(dt, end - t);
    if (mode == RockingMode::Rest) {
      const double a = integ.ground(t);
      if (a < -uplift_threshold(spec, 1)) {
        mode = RockingMode::RockingPos;
        out.uplifted = true;
      } else if (a > uplift_threshold(spec, -1)) {
        mode = RockingMode::RockingNeg;
        out.uplifted = true;
      } else {
        t += h;
        record();
        if (options.stop_when_settled && t >= integ.excitation_end()) break;
        continue;
      }
    }

    double remaining = h;
    int guard = 0;
    while (remaining > 0.0 && mode != RockingMode::Rest) {
      const int side = side_of(mode);
      const double alpha = spec.alpha(side);
      const State y1 = integ.rk4(y, t, remaining, side);
      if (!std::isfinite(y1.theta) || !std::isfinite(y1.omega))
        throw NumericalFailure("rocking integration produced a non-finite state", t);

      const bool topples = (side * y1.theta >= alpha && side * y1.omega > 0.0) ||
                           std::abs(y1.theta) >= half_pi;
      const bool crosses = side * y1.theta < 0.0;

      if (topples && !crosses) {
        const double tau = integ.locate(y, t, remaining, side,
                                        [&](const State& s) { return side * s.theta - alpha; });
        y = integ.rk4(y, t, tau, side);
        t += tau;
        note_peak(y, side);
        record();
        out.result = RockingResult::Toppled;
        out.topple_time = t;
        out.peak_tilt_ratio = std::max(out.peak_tilt_ratio, 1.0);
        return out;
      }
      if (crosses) {
        const double tau = integ.locate(y, t, remaining, side,
                                        [&](const State& s) { return -side * s.theta; });
        const State hit = integ.rk4(y, t, tau, side);
        t += tau;
        remaining -= tau;
        const double after = spec.restitution * hit.omega;
        out.impacts.push_back({t, hit.omega, after});
        if (std::abs(after) < floor || ++guard > 10000) {
          mode = RockingMode::Rest;
          y = {0.0, 0.0};
        } else {
          mode = mode_of(after > 0.0 ? 1 : -1);
          y = {0.0, after};
        }
        continue;
      }
      y = y1;
      t += remaining;
      remaining = 0.0;
      note_peak(y, side);
    }
    if (mode == RockingMode::Rest) t += remaining;
    record();
    if (options.stop_when_settled && mode == RockingMode::Rest && t >= integ.excitation_end()) break;
  }

  out.result = RockingResult::Balanced;
  out.settled = mode == RockingMode::Rest;
  return out;
}

std::vector<double> pulse_ground_accel(const motion::PulseParams& params, double dt, int polarity) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const double end = params.duration();
  const auto n = static_cast<std::size_t>(std::floor(end / dt + 1e-9)) + 1;
  std::vector<double> a(n);
  const double sign = polarity >= 0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) a[k] = sign * params.acceleration(static_cast<double>(k) * dt);
  return a;
}

RockingResult simulate_pulse(const RockSpec& spec, double pga, double kappa,
                             const DiagramOptions& options) {
  const auto params = motion::pulse_from_pga_kappa(pga, kappa, spec.gravity);
  const auto accel = pulse_ground_accel(params, options.dt, options.polarity);
  SimulationOptions sim;
  sim.max_time = params.duration() + options.settle_time;
  return simulate_rocking(spec, accel, options.dt, sim).result;
}

double refine_boundary(const RockSpec& spec, double kappa, double balanced_pga, double toppled_pga,
                       const DiagramOptions& options) {
  double lo = balanced_pga, hi = toppled_pga;
  while (hi - lo > options.boundary_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (simulate_pulse(spec, mid, kappa, options) == RockingResult::Toppled)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

void validate_grids(std::span<const double> pga_grid, std::span<const double> kappa_grid) {
  if (pga_grid.empty() || kappa_grid.empty()) throw DomainError("diagram grids must be non-empty");
  for (double p : pga_grid)
    if (!(p > 0.0)) throw DomainError("pga grid entries must be positive");
  for (double k : kappa_grid)
    if (!(k > 0.0)) throw DomainError("kappa grid entries must be positive");
  if (!std::is_sorted(pga_grid.begin(), pga_grid.end()))
    throw DomainError("pga grid must be ascending");
}

ResponseDiagram empty_diagram(std::span<const double> pga_grid, std::span<const double> kappa_grid) {
  ResponseDiagram d;
  d.pga_axis.assign(pga_grid.begin(), pga_grid.end());
  d.kappa_axis.assign(kappa_grid.begin(), kappa_grid.end());
  d.outcomes.assign(kappa_grid.size(),
                    std::vector<RockingResult>(pga_grid.size(), RockingResult::Balanced));
  d.boundary.assign(kappa_grid.size(), std::nullopt);
  return d;
}

std::optional<double> boundary_for(const RockSpec& spec, const ResponseDiagram& d, std::size_t k,
                                   const DiagramOptions& options) {
  const auto& row = d.outcomes[k];
  const auto first = std::find(row.begin(), row.end(), RockingResult::Toppled);
  if (first == row.end()) return std::nullopt;
  const auto i = static_cast<std::size_t>(first - row.begin());
  if (i == 0 || !options.refine_boundary) return d.pga_axis[i];
  return refine_boundary(spec, d.kappa_axis[k], d.pga_axis[i - 1], d.pga_axis[i], options);
}

}  // namespace

ResponseDiagram response_diagram(const RockSpec& spec, std::span<const double> pga_grid,
                                 std::span<const double> kappa_grid, const DiagramOptions& options) {
  spec.validate();
  validate_grids(pga_grid, kappa_grid);
  auto d = empty_diagram(pga_grid, kappa_grid);
  const auto nk = static_cast<long>(kappa_grid.size());
  const auto np = static_cast<long>(pga_grid.size());

  // Exceptions cannot leave an OpenMP region; the first one is rethrown after.
  std::exception_ptr failure;
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (long k = 0; k < nk; ++k)
    for (long p = 0; p < np; ++p) {
      try {
        d.outcomes[k][p] = simulate_pulse(spec, pga_grid[p], kappa_grid[k], options);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  if (failure) std::rethrow_exception(failure);

#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < nk; ++k) {
    try {
      d.boundary[k] = boundary_for(spec, d, static_cast<std::size_t>(k), options);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return d;
}

ResponseDiagram response_diagram_serial(const RockSpec& spec, std::span<const double> pga_grid,
                                        std::span<const double> kappa_grid,
                                        const DiagramOptions& options) {
  spec.validate();
  validate_grids(pga_grid, kappa_grid);
  auto d = empty_diagram(pga_grid, kappa_grid);
  for (std::size_t k = 0; k < kappa_grid.size(); ++k)
    for (std::size_t p = 0; p < pga_grid.size(); ++p)
      d.outcomes[k][p] = simulate_pulse(spec, pga_grid[p], kappa_grid[k], options);
  for (std::size_t k = 0; k < kappa_grid.size(); ++k) d.boundary[k] = boundary_for(spec, d, k, options);
  return d;
}

}  // namespace shakebot::rocking
