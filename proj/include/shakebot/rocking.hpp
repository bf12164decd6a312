#pragma once

#include <optional>
#include <span>
#include <vector>

#include "shakebot/ground_motion.hpp"

namespace shakebot::rocking {

/// Planar rigid block rocking on two base edges. Each side carries its own
/// slenderness angle, edge-to-centroid distance and moment of inertia about
/// that edge, so one 2D section can stand in for a rock at one yaw angle.
struct RockSpec {
  double alpha_pos = 0.2;  // rad
  double alpha_neg = 0.2;
  double radius_pos = 0.1;  // m
  double radius_neg = 0.1;
  double mass = 1.0;  // kg
  double inertia_pos = 4.0 / 3.0 * 0.01;  // kg m^2 about the + edge
  double inertia_neg = 4.0 / 3.0 * 0.01;
  double restitution = 0.9;
  double gravity = motion::kStandardGravity;

  void validate() const;
  double alpha(int side) const { return side > 0 ? alpha_pos : alpha_neg; }
  /// p^2 = m g R / I_edge for the given side.
  double p_squared(int side) const;
  /// Same block turned by 180 degrees about the vertical: edges swap.
  RockSpec mirrored() const;
  /// Every length scaled by s (inertia by s^2).
  RockSpec scaled(double s) const;
};

/// Housner's angular-momentum restitution for a rectangular block.
double housner_restitution(double alpha);

/// Uniform rectangular block standing on its base. When restitution is
/// omitted the Housner value is used.
RockSpec block_from_box(double width, double height, double mass,
                        std::optional<double> restitution = std::nullopt,
                        double gravity = motion::kStandardGravity);

/// Minimum ground acceleration magnitude that lifts the block onto the given
/// edge: g tan(alpha_side). Positive rocking (theta > 0) is driven by ground
/// acceleration toward -x, negative rocking by acceleration toward +x.
double uplift_threshold(const RockSpec& spec, int side);

enum class RockingMode { Rest, RockingPos, RockingNeg, Toppled };

struct RockingState {
  double theta = 0.0;
  double theta_dot = 0.0;
  RockingMode mode = RockingMode::Rest;
};

enum class RockingResult { Toppled, Balanced };

struct TrajectoryPoint {
  double t = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct ImpactRecord {
  double t = 0.0;
  double omega_before = 0.0;
  double omega_after = 0.0;
};

struct RockingOutcome {
  RockingResult result = RockingResult::Balanced;
  double peak_tilt_ratio = 0.0;
  double topple_time = -1.0;
  bool uplifted = false;
  bool settled = false;  // back at Rest when the run ended
  std::vector<TrajectoryPoint> trajectory;
  std::vector<ImpactRecord> impacts;
};

struct SimulationOptions {
  double max_time = 10.0;
  bool record_trajectory = false;
  /// Start from a tilted state instead of Rest (free-rocking studies).
  std::optional<RockingState> initial;
  /// Post-impact angular speed below floor * p is treated as coming to rest.
  double rest_floor = 1e-5;
  /// Stop as soon as the excitation is over and the block is at rest.
  bool stop_when_settled = true;
};

/// Event-driven RK4 integration of the piecewise rocking equation
///   theta'' = -p^2 [ sin(s alpha - theta) + (a_g / g) cos(s alpha - theta) ],  s = sgn(theta)
/// with step dt. ground_accel is sampled every dt from t = 0 and is zero past
/// its end. Zero crossings are located by bisection and apply
/// theta_dot <- e * theta_dot with an edge switch; toppling is declared when
/// |theta| reaches alpha with outward velocity (or pi/2).
/// Throws NumericalFailure if the state becomes non-finite.
RockingOutcome simulate_rocking(const RockSpec& spec, std::span<const double> ground_accel,
                                double dt, const SimulationOptions& options = {});

/// Pulse acceleration sampled every dt over [0, 1/f]; polarity -1 mirrors it.
std::vector<double> pulse_ground_accel(const motion::PulseParams& params, double dt,
                                       int polarity = 1);

struct DiagramOptions {
  double dt = 1e-4;
  /// +1: pulse displacement toward +x, whose long middle lobe (a < 0) drives
  /// rocking about the + edge.
  int polarity = 1;
  double settle_time = 3.0;  // simulated after the pulse ends
  bool refine_boundary = true;
  double boundary_tolerance = 0.01;  // relative to PGA
};

struct ResponseDiagram {
  std::vector<double> pga_axis;
  std::vector<double> kappa_axis;
  /// outcomes[k][p] for kappa_axis[k], pga_axis[p].
  std::vector<std::vector<RockingResult>> outcomes;
  /// Minimal toppling PGA per kappa; nullopt when no grid PGA topples.
  std::vector<std::optional<double>> boundary;
};

RockingResult simulate_pulse(const RockSpec& spec, double pga, double kappa,
                             const DiagramOptions& options);

/// Bisection between a balanced and a toppling PGA down to the relative tolerance.
double refine_boundary(const RockSpec& spec, double kappa, double balanced_pga, double toppled_pga,
                       const DiagramOptions& options);

/// OpenMP-parallel over grid cells; results are merged by grid index.
ResponseDiagram response_diagram(const RockSpec& spec, std::span<const double> pga_grid,
                                 std::span<const double> kappa_grid,
                                 const DiagramOptions& options = {});

/// Single-threaded reference with identical results.
ResponseDiagram response_diagram_serial(const RockSpec& spec, std::span<const double> pga_grid,
                                        std::span<const double> kappa_grid,
                                        const DiagramOptions& options = {});

}  // namespace shakebot::rocking
