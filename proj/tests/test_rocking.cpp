#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles/rocking_reference.hpp"
#include "shakebot/errors.hpp"
#include "shakebot/rocking.hpp"

using namespace shakebot;
using namespace shakebot::rocking;

namespace {

constexpr double g = motion::kStandardGravity;

RockSpec test_block() { return block_from_box(0.03, 0.15, 0.1); }

oracle::Block as_oracle(const RockSpec& s) {
  return {s.alpha_pos, s.alpha_neg, s.p_squared(1), s.p_squared(-1), s.restitution, s.gravity};
}

}  // namespace

TEST_CASE("uplift threshold") {
  RockSpec s;
  s.alpha_pos = s.alpha_neg = std::atan(0.2);
  CHECK(uplift_threshold(s, 1) == doctest::Approx(0.2 * g).epsilon(1e-12));
  CHECK(uplift_threshold(s, -1) == doctest::Approx(1.9613).epsilon(1e-4));
  s.alpha_pos = std::numbers::pi / 2 - 1e-9;
  CHECK(uplift_threshold(s, 1) > 1e9);
  s.alpha_pos = 0.15;
  s.alpha_neg = 0.3;
  CHECK(uplift_threshold(s, 1) < uplift_threshold(s, -1));
}

TEST_CASE("box geometry") {
  const auto sq = block_from_box(0.2, 0.2, 1.0);
  CHECK(sq.alpha_pos == doctest::Approx(std::numbers::pi / 4));
  CHECK(sq.alpha_neg == sq.alpha_pos);
  const auto slim = block_from_box(0.04, 0.20, 1.0);
  CHECK(slim.alpha_pos == doctest::Approx(0.1974).epsilon(1e-4));
  CHECK(slim.radius_pos == doctest::Approx(std::hypot(0.02, 0.10)));
  CHECK(slim.restitution == doctest::Approx(housner_restitution(slim.alpha_pos)));
  CHECK(housner_restitution(0.2) == doctest::Approx(std::pow(1.0 - 1.5 * std::pow(std::sin(0.2), 2), 2)));
  CHECK(block_from_box(0.04, 0.2, 1.0, 0.7).restitution == 0.7);

  // Second moment about the base corner from uniform samples of the section.
  const double w = 0.07, h = 0.19, m = 2.3;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ux(0.0, w), uy(0.0, h);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double x = ux(rng), y = uy(rng);
    sum += x * x + y * y;
  }
  const double mc = m * sum / n;
  const auto box = block_from_box(w, h, m);
  CHECK(std::abs(box.inertia_pos / mc - 1.0) < 0.005);
  CHECK(box.inertia_neg == box.inertia_pos);

  CHECK_THROWS_AS(block_from_box(0.0, 0.1, 1.0), DomainError);
}

TEST_CASE("rock validation and transforms") {
  RockSpec s;
  CHECK_NOTHROW(s.validate());
  s.restitution = 0.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.restitution = 0.9;
  s.alpha_neg = std::numbers::pi / 2;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.alpha_neg = 0.2;
  s.radius_pos = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);

  RockSpec a;
  a.alpha_pos = 0.1;
  a.alpha_neg = 0.3;
  a.inertia_pos = 0.02;
  const auto m = a.mirrored();
  CHECK(m.alpha_pos == 0.3);
  CHECK(m.alpha_neg == 0.1);
  CHECK(m.inertia_neg == 0.02);
  const auto sc = a.scaled(4.0);
  CHECK(sc.radius_pos == 4.0 * a.radius_pos);
  CHECK(sc.inertia_pos == doctest::Approx(16.0 * a.inertia_pos));
  CHECK(sc.p_squared(1) == doctest::Approx(a.p_squared(1) / 4.0));
}

TEST_CASE("no excitation") {
  const std::vector<double> zero(1000, 0.0);
  const auto out = simulate_rocking(test_block(), zero, 1e-3);
  CHECK(out.result == RockingResult::Balanced);
  CHECK(out.peak_tilt_ratio == 0.0);
  CHECK_FALSE(out.uplifted);
  CHECK(out.settled);
}

TEST_CASE("quasi-static ramp below threshold") {
  const auto s = test_block();
  std::vector<double> ramp;
  for (int k = 0; k <= 20000; ++k) ramp.push_back(-0.5 * uplift_threshold(s, 1) * k / 20000.0);
  const auto out = simulate_rocking(s, ramp, 1e-4);
  CHECK(out.result == RockingResult::Balanced);
  CHECK_FALSE(out.uplifted);
  CHECK(out.peak_tilt_ratio == 0.0);
}

TEST_CASE("long strong pulse topples and the brute-force oracle agrees") {
  const auto s = test_block();
  const double p = std::sqrt(s.p_squared(1));
  const double pga = 3.0 * uplift_threshold(s, 1);
  // Pulse period 2 pi kappa far longer than 2 pi / p.
  const double kappa = 20.0 / p;
  DiagramOptions opt;
  CHECK(simulate_pulse(s, pga, kappa, opt) == RockingResult::Toppled);
  const auto ag = oracle::pulse_accel(pga, kappa, 1);
  const double dur = 2.0 * std::numbers::pi * kappa;
  CHECK(oracle::brute_rocking(as_oracle(s), ag, dur + 3.0, dur, 1e-6) == oracle::Fate::Toppled);
}

TEST_CASE("non-finite input") {
  const std::vector<double> bad{0.0, std::nan(""), 0.0};
  CHECK_THROWS_AS(simulate_rocking(test_block(), bad, 1e-3), DomainError);
  const std::vector<double> huge(100, -1e307);
  CHECK_THROWS_AS(simulate_rocking(test_block(), huge, 1e-3), NumericalFailure);
}

TEST_CASE("free rocking decays with e squared energy per impact") {
  const auto s = test_block();
  SimulationOptions opt;
  opt.max_time = 20.0;
  opt.record_trajectory = true;
  opt.initial = RockingState{0.8 * s.alpha_pos, 0.0, RockingMode::RockingPos};
  const auto out = simulate_rocking(s, {}, 1e-4, opt);
  CHECK(out.result == RockingResult::Balanced);
  CHECK(out.settled);
  REQUIRE(out.impacts.size() >= 5);
  for (const auto& imp : out.impacts) {
    const double ratio = (imp.omega_after * imp.omega_after) / (imp.omega_before * imp.omega_before);
    CHECK(ratio == doctest::Approx(s.restitution * s.restitution).epsilon(1e-12));
  }
  // Peak |theta| between consecutive impacts.
  std::vector<double> peaks;
  std::size_t next = 0;
  double peak = 0.0;
  for (const auto& pt : out.trajectory) {
    if (next < out.impacts.size() && pt.t > out.impacts[next].t) {
      peaks.push_back(peak);
      peak = 0.0;
      ++next;
    }
    peak = std::max(peak, std::abs(pt.theta));
  }
  // Below about 1e-6 alpha the swings are at integration round-off.
  std::erase_if(peaks, [&](double x) { return x < 1e-6 * s.alpha_pos; });
  REQUIRE(peaks.size() >= 5);
  for (std::size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i] < peaks[i - 1]);
}

TEST_CASE("free rocking never topples") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> frac(-0.99, 0.99);
  const auto s = block_from_box(0.05, 0.2, 0.3);
  for (int i = 0; i < 30; ++i) {
    const double th = frac(rng) * s.alpha_pos;
    SimulationOptions opt;
    opt.max_time = 30.0;
    opt.initial = RockingState{th, 0.0, th > 0 ? RockingMode::RockingPos : RockingMode::RockingNeg};
    const auto out = simulate_rocking(s, {}, 1e-4, opt);
    CHECK(out.result == RockingResult::Balanced);
    CHECK(out.settled);
  }
}

TEST_CASE("mirror symmetry") {
  RockSpec a = block_from_box(0.04, 0.15, 0.2);
  a.alpha_neg = 0.35;
  DiagramOptions plus, minus;
  minus.polarity = -1;
  plus.settle_time = minus.settle_time = 1.0;
  plus.dt = minus.dt = 2e-4;
  for (double pga : {1.0, 2.5, 4.0, 6.0})
    for (double kappa : {0.05, 0.1, 0.2}) {
      CHECK(simulate_pulse(a, pga, kappa, plus) == simulate_pulse(a.mirrored(), pga, kappa, minus));
    }

  const auto sym = test_block();
  const std::vector<double> pga{1.0, 2.0, 3.0, 4.0, 6.0}, kappa{0.05, 0.1, 0.2};
  const auto dp = response_diagram(sym, pga, kappa, plus);
  const auto dm = response_diagram(sym, pga, kappa, minus);
  CHECK(dp.outcomes == dm.outcomes);
}

TEST_CASE("scale similarity") {
  const auto base = test_block();
  const std::vector<double> pga{0.5, 1.0, 2.0, 3.0, 4.5, 7.0};
  const std::vector<double> kappa{0.04, 0.08, 0.15, 0.3};
  DiagramOptions opt;
  opt.dt = 2e-4;
  opt.settle_time = 1.5;
  opt.refine_boundary = false;
  const auto ref = response_diagram(base, pga, kappa, opt);
  for (double s : {0.5, 2.0, 4.0}) {
    std::vector<double> k2;
    for (double k : kappa) k2.push_back(k * std::sqrt(s));
    DiagramOptions o = opt;
    o.dt *= std::sqrt(s);
    o.settle_time *= std::sqrt(s);
    const auto d = response_diagram(base.scaled(s), pga, k2, o);
    CHECK(d.outcomes == ref.outcomes);
  }
}

TEST_CASE("diagram structure") {
  const auto s = test_block();
  const std::vector<double> low{0.1, 0.5, 1.0};
  const std::vector<double> kappa{0.05, 0.1};
  const auto calm = response_diagram(s, low, kappa);
  for (const auto& row : calm.outcomes)
    for (auto r : row) CHECK(r == RockingResult::Balanced);
  for (const auto& b : calm.boundary) CHECK_FALSE(b.has_value());

  const std::vector<double> pga{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0};
  const std::vector<double> k2{0.03, 0.06, 0.1, 0.15, 0.25};
  DiagramOptions opt;
  opt.dt = 2e-4;
  opt.settle_time = 1.5;
  const auto par = response_diagram(s, pga, k2, opt);
  const auto ser = response_diagram_serial(s, pga, k2, opt);
  CHECK(par.outcomes == ser.outcomes);
  CHECK(par.boundary == ser.boundary);
  REQUIRE(par.outcomes.size() == k2.size());
  for (std::size_t k = 0; k < k2.size(); ++k) {
    CHECK(par.outcomes[k].size() == pga.size());
    if (!par.boundary[k]) continue;
    CHECK(*par.boundary[k] >= uplift_threshold(s, 1));
    CHECK(*par.boundary[k] >= pga.front());
    CHECK(*par.boundary[k] <= pga.back());
  }
}

TEST_CASE("pulse ground acceleration samples") {
  const auto p = motion::pulse_from_pga_kappa(2.0, 0.1);
  const auto a = pulse_ground_accel(p, 1e-3, 1);
  CHECK(a.size() == static_cast<std::size_t>(std::floor(p.duration() / 1e-3)) + 1);
  CHECK(a.front() == doctest::Approx(2.0));
  const auto b = pulse_ground_accel(p, 1e-3, -1);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == -a[i]);
}

TEST_CASE("refined boundary lies between its brackets") {
  const auto s = test_block();
  DiagramOptions opt;
  opt.dt = 2e-4;
  opt.settle_time = 1.5;
  const double lo = 1.0, hi = 8.0;
  REQUIRE(simulate_pulse(s, lo, 0.1, opt) == RockingResult::Balanced);
  REQUIRE(simulate_pulse(s, hi, 0.1, opt) == RockingResult::Toppled);
  const double b = refine_boundary(s, 0.1, lo, hi, opt);
  CHECK(b > lo);
  CHECK(b <= hi);
  CHECK(simulate_pulse(s, b, 0.1, opt) == RockingResult::Toppled);
  CHECK(simulate_pulse(s, b * (1.0 - 0.01), 0.1, opt) == RockingResult::Balanced);
}
