#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

/// Minimal block description for the brute-force integrator.
struct Block {
  double alpha_pos, alpha_neg;
  double p2_pos, p2_neg;  // m g R / I per edge
  double e;
  double g = 9.80665;
};

enum class Fate { Toppled, Standing };

/// Fixed-step RK4 on the rocking equation with the ground acceleration
/// evaluated analytically at every stage. Impacts are detected by a sign change
/// of theta over a step; the crossing instant is found by linear interpolation
/// and the step restarts there with theta = 0 and theta_dot scaled by e.
inline Fate brute_rocking(const Block& b, const std::function<double(double)>& ag, double t_end,
                          double excitation_end, double dt) {
  int side = 0;  // 0 at rest, +1 / -1 rocking on that edge
  double th = 0.0, om = 0.0, t = 0.0;
  const double floor_speed = 1e-5 * std::sqrt(std::max(b.p2_pos, b.p2_neg));

  auto rhs = [&](double tt, double x, int s) {
    const double a = s > 0 ? b.alpha_pos : b.alpha_neg;
    const double p2 = s > 0 ? b.p2_pos : b.p2_neg;
    const double phi = s * a - x;
    return -p2 * (std::sin(phi) + ag(tt) / b.g * std::cos(phi));
  };

  while (t < t_end) {
    if (side == 0) {
      const double a = ag(t);
      if (a < -b.g * std::tan(b.alpha_pos))
        side = 1;
      else if (a > b.g * std::tan(b.alpha_neg))
        side = -1;
      else {
        if (t > excitation_end) return Fate::Standing;
        t += dt;
        continue;
      }
    }
    const double k1x = om, k1v = rhs(t, th, side);
    const double k2x = om + 0.5 * dt * k1v, k2v = rhs(t + 0.5 * dt, th + 0.5 * dt * k1x, side);
    const double k3x = om + 0.5 * dt * k2v, k3v = rhs(t + 0.5 * dt, th + 0.5 * dt * k2x, side);
    const double k4x = om + dt * k3v, k4v = rhs(t + dt, th + dt * k3x, side);
    const double nth = th + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
    const double nom = om + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);

    if (side * nth < 0.0) {
      const double frac = th / (th - nth);
      const double w = om + frac * (nom - om);
      t += frac * dt;
      th = 0.0;
      om = b.e * w;
      side = om > 0.0 ? 1 : -1;
      if (std::abs(om) < floor_speed) {
        side = 0;
        om = 0.0;
      }
      continue;
    }
    th = nth;
    om = nom;
    t += dt;
    const double a = side > 0 ? b.alpha_pos : b.alpha_neg;
    if ((side * th >= a && side * om > 0.0) || std::abs(th) >= std::numbers::pi / 2)
      return Fate::Toppled;
  }
  return Fate::Standing;
}

/// Raised-cosine pulse acceleration for (pga, kappa), zero after one period.
inline std::function<double(double)> pulse_accel(double pga, double kappa, int polarity) {
  const double f = 1.0 / (2.0 * std::numbers::pi * kappa);
  return [=](double t) {
    if (t < 0.0 || t > 1.0 / f) return 0.0;
    return polarity * pga * std::cos(2.0 * std::numbers::pi * f * t);
  };
}

}  // namespace oracle
