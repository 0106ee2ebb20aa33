#include <doctest.h>

#include <cmath>

#include "circumnav/sensing.hpp"

using namespace circumnav;

TEST_SUITE("sensing") {

TEST_CASE("zero sigma is an exact pass-through") {
  AgentState agent{{15, 0}, {0, 60}};
  Rng rng(1);
  Observation obs = observe({0, 0}, agent, NoiseModel{0.0, true}, rng);
  CHECK(obs.bearing.x == -1.0);
  CHECK(obs.bearing.y == 0.0);
  CHECK(obs.agent_vel.x == 0.0);
  CHECK(obs.agent_vel.y == 60.0);
}

TEST_CASE("coincident positions propagate") {
  AgentState agent{{1, 1}, {0, 0}};
  Rng rng(1);
  CHECK_THROWS_AS(observe({1, 1}, agent, NoiseModel{}, rng), CoincidentPositions);
}

TEST_CASE("noisy bearing is renormalized to unit norm") {
  AgentState agent{{15, 0}, {0, 60}};
  for (double sigma : {0.1, 0.3}) {
    Rng rng(42);
    for (int k = 0; k < 2000; ++k) {
      Observation obs = observe({0, 0}, agent, NoiseModel{sigma, true}, rng);
      REQUIRE(std::abs(obs.bearing.norm() - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("degenerate perturbed bearing is an error, not a division") {
  Observation clean{{-1.0, 0.0}, {0.0, 60.0}};
  NoiseDraw kill{1.0, 0.0, 0.0, 0.0};  // cancels the bearing exactly
  CHECK_THROWS_AS(perturb_observation(clean, kill, true), DegenerateBearing);
  // without renormalization the raw perturbed value passes through
  Observation raw = perturb_observation(clean, kill, false);
  CHECK(raw.bearing.x == 0.0);
  CHECK(raw.bearing.y == 0.0);
}

TEST_CASE("noise statistics: unbiased, correct sigma, near-truth mean") {
  AgentState agent{{15, 0}, {0, 60}};
  const int n = 100000;
  const double sigma = 0.1;
  Rng rng(777);
  double sum_vx = 0.0, sum_vy = 0.0, sq_vx = 0.0, sq_vy = 0.0;
  double sum_bx = 0.0, sum_by = 0.0;
  for (int k = 0; k < n; ++k) {
    Observation obs = observe({0, 0}, agent, NoiseModel{sigma, true}, rng);
    double nx = obs.agent_vel.x - 0.0;  // additive noise on the velocity components
    double ny = obs.agent_vel.y - 60.0;
    sum_vx += nx;
    sum_vy += ny;
    sq_vx += nx * nx;
    sq_vy += ny * ny;
    sum_bx += obs.bearing.x;
    sum_by += obs.bearing.y;
  }
  // mean additive perturbation within +-0.005
  CHECK(std::abs(sum_vx / n) <= 0.005);
  CHECK(std::abs(sum_vy / n) <= 0.005);
  // empirical sigma within 2% of 0.1
  CHECK(std::sqrt(sq_vx / n) == doctest::Approx(sigma).epsilon(0.02));
  CHECK(std::sqrt(sq_vy / n) == doctest::Approx(sigma).epsilon(0.02));
  // renormalized bearing concentrates near the true direction
  CHECK(sum_bx / n == doctest::Approx(-1.0).epsilon(0.02));
  CHECK(std::abs(sum_by / n) <= 0.005);
}

TEST_CASE("distinct streams are uncorrelated") {
  // frozen master seeds; |rho| has standard error 1/sqrt(n) = 0.01 here
  for (std::uint64_t master : {1, 6}) {
    Rng a(Rng::derive(master, 0));
    Rng b(Rng::derive(master, 1));
    const int n = 10000;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int k = 0; k < n; ++k) {
      double x = a.normal(0, 1);
      double y = b.normal(0, 1);
      sa += x;
      sb += y;
      saa += x * x;
      sbb += y * y;
      sab += x * y;
    }
    double cov = sab / n - (sa / n) * (sb / n);
    double rho = cov / std::sqrt((saa / n - sa / n * sa / n) * (sbb / n - sb / n * sb / n));
    CHECK(std::abs(rho) < 0.02);
  }
}

TEST_CASE("same stream is deterministic") {
  Rng a(123), b(123);
  for (int k = 0; k < 100; ++k) {
    REQUIRE(a.uniform01() == b.uniform01());
    REQUIRE(a.normal(0, 2) == b.normal(0, 2));
  }
}

}  // TEST_SUITE
