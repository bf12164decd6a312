#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles/dft.hpp"
#include "shakebot/errors.hpp"
#include "shakebot/filter.hpp"

using namespace shakebot;
using namespace shakebot::motion;

namespace {

double response(const std::vector<Section>& sections, double freq, double fs) {
  const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * freq / fs);
  const std::complex<double> zi = 1.0 / z;
  std::complex<double> h{1.0, 0.0};
  for (const auto& s : sections)
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  return std::abs(h);
}

}  // namespace

TEST_CASE("butterworth magnitude at landmarks") {
  for (int order : {1, 2, 3, 4}) {
    const auto lp = butterworth_sections({FilterKind::LowPass, order, 10.0}, 200.0);
    CHECK(lp.size() == static_cast<std::size_t>((order + 1) / 2));
    CHECK(response(lp, 0.0, 200.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(response(lp, 10.0, 200.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(response(lp, 99.999, 200.0) < 1e-3);

    const auto hp = butterworth_sections({FilterKind::HighPass, order, 10.0}, 200.0);
    CHECK(response(hp, 0.0, 200.0) < 1e-12);
    CHECK(response(hp, 10.0, 200.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(response(hp, 100.0, 200.0) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant series") {
  const std::vector<double> c(500, 2.5);
  for (double x : apply_filter(c, 0.01, {FilterKind::LowPass, 2, 5.0}))
    CHECK(x == doctest::Approx(2.5).epsilon(1e-9));
  for (double x : apply_filter(c, 0.01, {FilterKind::LowPass, 3, 5.0}))
    CHECK(x == doctest::Approx(2.5).epsilon(1e-9));
  for (double x : apply_filter(c, 0.01, {FilterKind::HighPass, 2, 1.0})) CHECK(std::abs(x) < 1e-6);
}

TEST_CASE("low-pass separates tones") {
  const double dt = 1e-3;
  std::vector<double> x;
  for (int n = 0; n < 10000; ++n) {
    const double t = n * dt;
    x.push_back(std::sin(2.0 * std::numbers::pi * t) + std::sin(2.0 * std::numbers::pi * 50.0 * t));
  }
  const auto y = apply_filter(x, dt, {FilterKind::LowPass, 2, 10.0});
  REQUIRE(y.size() == x.size());
  const double in50 = oracle::tone_amplitude(x, dt, 50.0);
  const double out50 = oracle::tone_amplitude(y, dt, 50.0);
  CHECK(20.0 * std::log10(in50 / out50) >= 20.0);
  CHECK(oracle::tone_amplitude(y, dt, 1.0) == doctest::Approx(oracle::tone_amplitude(x, dt, 1.0)).epsilon(0.02));
}

TEST_CASE("zero phase") {
  const double dt = 1e-3;
  std::vector<double> x;
  for (int n = 0; n < 8000; ++n) x.push_back(std::sin(2.0 * std::numbers::pi * 2.0 * n * dt));
  const auto y = apply_filter(x, dt, {FilterKind::LowPass, 2, 20.0});
  for (std::size_t n = 2000; n < 6000; ++n) CHECK(std::abs(y[n] - x[n]) < 1e-3);
}

TEST_CASE("filter preconditions") {
  const std::vector<double> x(100, 1.0);
  CHECK_THROWS_AS(apply_filter(x, 0.01, {FilterKind::LowPass, 0, 5.0}), DomainError);
  CHECK_THROWS_AS(apply_filter(x, 0.01, {FilterKind::LowPass, 2, 50.0}), DomainError);
  CHECK_THROWS_AS(apply_filter(x, 0.01, {FilterKind::LowPass, 2, 0.0}), DomainError);
  CHECK_THROWS_AS(apply_filter(x, 0.0, {FilterKind::LowPass, 2, 5.0}), DomainError);
  const FilterSpec spec{FilterKind::LowPass, 2, 5.0};
  const std::vector<double> shortx(filter_warm_up_length(spec) - 1, 1.0);
  CHECK_THROWS_AS(apply_filter(shortx, 0.01, spec), DomainError);
  const std::vector<double> okx(filter_warm_up_length(spec), 1.0);
  CHECK_NOTHROW(apply_filter(okx, 0.01, spec));
}
