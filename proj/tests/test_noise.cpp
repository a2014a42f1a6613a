#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "levylab/noise.hpp"
#include "levylab/rng.hpp"

using levylab::JumpMeasureConfig;
using levylab::LevyPathSegment;
using levylab::QWienerConfig;
using levylab::SegmentRequest;
using levylab::Vec;

namespace {

JumpMeasureConfig power_law(double c_plus, double c_minus, double alpha,
                            double y_max, double rho) {
  JumpMeasureConfig j;
  j.family = levylab::JumpFamily::truncated_power_law;
  j.small_cutoff = rho;
  j.alpha = alpha;
  j.c_plus = c_plus;
  j.c_minus = c_minus;
  j.y_max = y_max;
  j.direction = levylab::JumpDirection::fixed_mode;
  j.direction_mode = 1;
  return j;
}

// Simpson quadrature of integrand(x) on [a,b].
template <typename F>
double simpson(F f, double a, double b, int n) {
  if (n % 2) ++n;
  double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("noise") {

TEST_CASE("wiener increment variance matches q dt within 3 standard errors") {
  QWienerConfig q;
  q.q = {1.0, 0.25, 1.0 / 9.0, 0.0625};
  const double dt = 0.01;
  const int n = 100000;
  levylab::RngStream stream(11, 0, levylab::rng_purpose::wiener);
  std::vector<double> grid = {0.0, dt};
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    levylab::RngStream s(11, std::uint64_t(i), levylab::rng_purpose::wiener);
    auto inc = levylab::sample_wiener_increments(q, grid, s);
    double x = inc[0][0];
    sum += x;
    sum2 += x * x;
  }
  double mean = sum / n;
  double var = sum2 / n - mean * mean;
  double target = q.q[0] * dt;
  double se = target * std::sqrt(2.0 / n);
  CHECK(std::fabs(var - target) < 3 * se);
}

TEST_CASE("zero-length steps produce zero increments") {
  QWienerConfig q;
  q.q = {1.0, 0.5};
  levylab::RngStream s(3, 0, levylab::rng_purpose::wiener);
  std::vector<double> grid = {0.0, 0.25, 0.25, 0.5};
  auto inc = levylab::sample_wiener_increments(q, grid, s);
  REQUIRE(inc.size() == 3);
  CHECK(inc[1][0] == 0.0);
  CHECK(inc[1][1] == 0.0);
  CHECK(inc[0][0] != 0.0);
}

TEST_CASE("decreasing grids are rejected") {
  QWienerConfig q;
  q.q = {1.0};
  levylab::RngStream s(3, 0, levylab::rng_purpose::wiener);
  std::vector<double> grid = {0.0, 0.5, 0.25};
  CHECK_THROWS_AS(levylab::sample_wiener_increments(q, grid, s), std::invalid_argument);
}

TEST_CASE("power-law closed forms match quadrature") {
  auto j = power_law(0.3, 0.1, 0.5, 2.0, 0.1);
  j.validate();

  // b = nu(|y| >= 1) = (c+ + c-) (1 - R^-alpha)/alpha
  double b_quad = simpson([](double x) { return 0.4 * std::pow(x, -1.5); }, 1.0, 2.0, 4000);
  CHECK(j.large_jump_rate() == doctest::Approx(0.23431457505076203).epsilon(1e-12));
  CHECK(j.large_jump_rate() == doctest::Approx(b_quad).epsilon(1e-8));

  // compensator on rho <= |y| < 1: (c+ - c-) int_rho^1 x^-alpha dx
  double drift_quad = simpson([](double x) { return 0.2 * std::pow(x, -0.5); }, 0.1, 1.0, 4000);
  CHECK(j.compensator_scalar() == doctest::Approx(0.27350889359326486).epsilon(1e-12));
  CHECK(j.compensator_scalar() == doctest::Approx(drift_quad).epsilon(1e-8));

  // small second moment includes the mass below the sampling cutoff
  double m2s_quad = simpson([](double x) { return 0.4 * x * x * std::pow(x, -1.5); }, 1e-9, 1.0, 200000);
  CHECK(j.second_moment_small() == doctest::Approx(0.4 / 1.5).epsilon(1e-12));
  CHECK(j.second_moment_small() == doctest::Approx(m2s_quad).epsilon(1e-4));

  double m2l_quad = simpson([](double x) { return 0.4 * x * x * std::pow(x, -1.5); }, 1.0, 2.0, 4000);
  CHECK(j.second_moment_large() == doctest::Approx(m2l_quad).epsilon(1e-8));

  // absolute first moments
  CHECK(j.abs_moment_small() == doctest::Approx(0.4 / 0.5).epsilon(1e-12));
  double m1l_quad = simpson([](double x) { return 0.4 * x * std::pow(x, -1.5); }, 1.0, 2.0, 4000);
  CHECK(j.abs_moment_large() == doctest::Approx(m1l_quad).epsilon(1e-8));
}

TEST_CASE("first small-jump moment diverges for alpha >= 1") {
  auto j = power_law(0.25, 0.25, 1.5, 2.0, 0.1);
  CHECK(std::isinf(j.abs_moment_small()));
  auto j1 = power_law(0.25, 0.25, 1.0, 2.0, 0.1);
  CHECK(std::isinf(j1.abs_moment_small()));
}

TEST_CASE("finite atom functionals are plain sums") {
  JumpMeasureConfig j;
  j.family = levylab::JumpFamily::finite_atoms;
  j.small_cutoff = 0.1;
  j.atom_sizes = {0.5, -0.3, 1.0, -2.0, 0.05};
  j.atom_rates = {1.0, 2.0, 0.5, 0.25, 9.0};
  j.direction = levylab::JumpDirection::fixed_mode;
  j.direction_mode = 1;
  j.validate();
  CHECK(j.large_jump_rate() == doctest::Approx(0.75).epsilon(1e-15));
  // sampled rate excludes the atom below the cutoff
  CHECK(j.sampling_rate() == doctest::Approx(3.75).epsilon(1e-15));
  CHECK(j.compensator_scalar() == doctest::Approx(0.5 * 1.0 - 0.3 * 2.0).epsilon(1e-15));
  CHECK(j.second_moment_small() ==
        doctest::Approx(0.25 * 1.0 + 0.09 * 2.0 + 0.0025 * 9.0).epsilon(1e-15));
  CHECK(j.second_moment_large() == doctest::Approx(1.0 * 0.5 + 4.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("invalid jump configurations are rejected") {
  CHECK_THROWS_AS(power_law(0.25, 0.25, 2.0, 2.0, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(power_law(0.25, 0.25, 0.5, 2.0, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(power_law(0.25, 0.25, 0.5, 2.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(power_law(0.25, 0.25, 0.5, 0.05, 0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(power_law(-0.1, 0.25, 0.5, 2.0, 0.1).validate(), std::invalid_argument);
  JumpMeasureConfig j;
  j.family = levylab::JumpFamily::finite_atoms;
  j.small_cutoff = 0.1;
  j.atom_sizes = {0.5};
  j.atom_rates = {1.0, 2.0};
  CHECK_THROWS_AS(j.validate(), std::invalid_argument);
}

TEST_CASE("large-jump count matches rate b over the window") {
  // single atom of rate 0.5 at |y| >= 1 gives b = 0.5; window [0,10] -> mean 5
  JumpMeasureConfig j;
  j.family = levylab::JumpFamily::finite_atoms;
  j.small_cutoff = 0.1;
  j.atom_sizes = {1.5};
  j.atom_rates = {0.5};
  j.direction = levylab::JumpDirection::fixed_mode;
  j.direction_mode = 1;
  QWienerConfig q;
  q.q = {1.0};
  const int reps = 10000;
  double total = 0;
  for (int i = 0; i < reps; ++i) {
    SegmentRequest req{0.0, 0.01, 1000, 17, std::uint64_t(i), 0};
    auto seg = levylab::sample_segment(q, j, req);
    total += double(seg.large_events.size());
  }
  double mean = total / reps;
  double se = std::sqrt(5.0 / reps);
  CHECK(std::fabs(mean - 5.0) < 3 * se);
}

TEST_CASE("compensated band count has mean zero") {
  auto j = power_law(0.25, 0.25, 0.5, 2.0, 0.1);
  QWienerConfig q;
  q.q = {1.0};
  // band 0.5 <= |y| < 1: nu = 0.5 * 2 (1/sqrt(0.5) - 1) = sqrt(2) - 1
  const double band_rate = std::sqrt(2.0) - 1.0;
  const double T = 10.0;
  const int reps = 4000;
  double total = 0, total2 = 0;
  for (int i = 0; i < reps; ++i) {
    SegmentRequest req{0.0, 0.01, 1000, 18, std::uint64_t(i), 0};
    auto seg = levylab::sample_segment(q, j, req);
    int count = 0;
    for (const auto& e : seg.small_events) {
      if (std::fabs(e.size) >= 0.5) ++count;
    }
    double dev = count - band_rate * T;
    total += dev;
    total2 += dev * dev;
  }
  double mean = total / reps;
  double sd = std::sqrt(total2 / reps - mean * mean);
  CHECK(std::fabs(mean) < 3 * sd / std::sqrt(double(reps)));
}

TEST_CASE("sampled small events never cross the cutoff boundaries") {
  auto j = power_law(0.25, 0.25, 0.5, 2.0, 0.1);
  QWienerConfig q;
  q.q = {1.0, 1.0};
  SegmentRequest req{0.0, 0.01, 2000, 19, 4, 0};
  auto seg = levylab::sample_segment(q, j, req);
  for (const auto& e : seg.small_events) {
    CHECK(std::fabs(e.size) >= 0.1);
    CHECK(std::fabs(e.size) < 1.0);
    CHECK(e.cell >= 0);
    CHECK(e.cell < 2000);
    CHECK(e.time >= 0.0);
    CHECK(e.time < 20.0);
  }
  for (const auto& e : seg.large_events) {
    CHECK(std::fabs(e.size) >= 1.0);
    CHECK(std::fabs(e.size) <= 2.0);
  }
}

TEST_CASE("deterministic step multiplier satisfies the discrete isometry") {
  QWienerConfig q;
  q.q = {1.0, 0.25, 1.0 / 9.0, 0.0625};
  const int steps = 50;
  const double dt = 0.02;
  const int modes = 4;
  // arbitrary fixed per-step multiplier
  std::vector<Vec> phi(steps, Vec(modes));
  for (int jstep = 0; jstep < steps; ++jstep) {
    for (int n = 0; n < modes; ++n) {
      phi[jstep][n] = std::sin(0.3 * jstep + n) + 0.5;
    }
  }
  double target = 0.0;
  for (int jstep = 0; jstep < steps; ++jstep) {
    for (int n = 0; n < modes; ++n) {
      target += phi[jstep][n] * phi[jstep][n] * q.q[n] * dt;
    }
  }
  std::vector<double> grid(steps + 1);
  for (int k = 0; k <= steps; ++k) grid[k] = k * dt;
  const int reps = 10000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < reps; ++i) {
    levylab::RngStream s(21, std::uint64_t(i), levylab::rng_purpose::wiener);
    auto inc = levylab::sample_wiener_increments(q, grid, s);
    Vec acc(modes, 0.0);
    for (int jstep = 0; jstep < steps; ++jstep) {
      for (int n = 0; n < modes; ++n) acc[n] += phi[jstep][n] * inc[jstep][n];
    }
    double nrm2 = 0;
    for (int n = 0; n < modes; ++n) nrm2 += acc[n] * acc[n];
    sum += nrm2;
    sum2 += nrm2 * nrm2;
  }
  double mean = sum / reps;
  double sd = std::sqrt(sum2 / reps - mean * mean);
  CHECK(std::fabs(mean - target) < 3 * sd / std::sqrt(double(reps)));
}

TEST_CASE("segments on opposite sides of zero have exchangeable moments") {
  QWienerConfig q;
  q.q = {0.5};
  auto j = power_law(0.25, 0.25, 0.5, 2.0, 0.1);
  const int reps = 3000;
  const int steps = 500;
  const double dt = 0.01;
  double var_target = q.q[0] * dt;
  for (int side = 0; side < 2; ++side) {
    double sum2 = 0;
    double jumps = 0;
    for (int i = 0; i < reps; ++i) {
      SegmentRequest req{side == 0 ? -5.0 : 0.0, dt, steps, 23, std::uint64_t(i),
                         std::uint64_t(side + 1)};
      auto seg = levylab::sample_segment(q, j, req);
      sum2 += seg.wiener[0] * seg.wiener[0];
      jumps += double(seg.small_events.size() + seg.large_events.size());
    }
    double var = sum2 / reps;
    CHECK(std::fabs(var - var_target) < 3 * var_target * std::sqrt(2.0 / reps));
    double rate = j.sampling_rate() * steps * dt;
    CHECK(std::fabs(jumps / reps - rate) < 3 * std::sqrt(rate / reps));
  }
}

TEST_CASE("segment sampling is reproducible and path-dependent") {
  QWienerConfig q;
  q.q = {1.0, 0.5};
  auto j = power_law(0.25, 0.25, 0.5, 2.0, 0.1);
  SegmentRequest req{0.0, 0.01, 200, 31, 5, 0};
  auto a = levylab::sample_segment(q, j, req);
  auto b = levylab::sample_segment(q, j, req);
  CHECK(a.wiener == b.wiener);
  REQUIRE(a.small_events.size() == b.small_events.size());
  for (std::size_t k = 0; k < a.small_events.size(); ++k) {
    CHECK(a.small_events[k].time == b.small_events[k].time);
    CHECK(a.small_events[k].size == b.small_events[k].size);
  }
  SegmentRequest other = req;
  other.path = 6;
  auto c = levylab::sample_segment(q, j, other);
  CHECK(a.wiener != c.wiener);
}

TEST_CASE("coarsening aggregates wiener increments and rebins events") {
  QWienerConfig q;
  q.q = {1.0, 0.5};
  auto j = power_law(0.5, 0.5, 0.5, 2.0, 0.1);
  SegmentRequest req{1.0, 0.005, 400, 37, 2, 0};
  auto fine = levylab::sample_segment(q, j, req);
  auto coarse = levylab::coarsen(fine, 2);
  CHECK(coarse.steps == 200);
  CHECK(coarse.dt == doctest::Approx(0.01).epsilon(1e-15));
  for (int n = 0; n < 2; ++n) {
    CHECK(coarse.wiener[0 * 2 + n] ==
          doctest::Approx(fine.wiener[0 * 2 + n] + fine.wiener[1 * 2 + n]).epsilon(1e-15));
  }
  REQUIRE(coarse.small_events.size() == fine.small_events.size());
  for (std::size_t k = 0; k < coarse.small_events.size(); ++k) {
    CHECK(coarse.small_events[k].cell == fine.small_events[k].cell / 2);
    CHECK(coarse.small_events[k].time == fine.small_events[k].time);
  }
  CHECK_THROWS_AS(levylab::coarsen(fine, 3), std::invalid_argument);
}

TEST_CASE("compensator drift vector follows the direction mode") {
  auto j = power_law(0.3, 0.1, 0.5, 2.0, 0.1);
  j.direction = levylab::JumpDirection::fixed_mode;
  j.direction_mode = 2;
  Vec v = levylab::compensator_drift(j, 4);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == doctest::Approx(0.27350889359326486).epsilon(1e-12));
  CHECK(v[2] == 0.0);
  j.direction = levylab::JumpDirection::random_mode;
  Vec r = levylab::compensator_drift(j, 4);
  for (int n = 0; n < 4; ++n) {
    CHECK(r[n] == doctest::Approx(0.27350889359326486 / 4.0).epsilon(1e-12));
  }
}

}  // TEST_SUITE
