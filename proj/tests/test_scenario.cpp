#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "levylab/scenario.hpp"

using levylab::Scenario;
using levylab::Vec;

namespace {

Vec random_vec(std::mt19937& gen, int n, double radius) {
  std::normal_distribution<double> nd;
  Vec v(n);
  double nrm2 = 0;
  for (auto& x : v) {
    x = nd(gen);
    nrm2 += x * x;
  }
  double s = radius / std::sqrt(nrm2);
  for (auto& x : v) x *= s;
  return v;
}

double dist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("builtin quasi-periodic scenario carries the pinned constants") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  CHECK(sc.name == "quasi_periodic_sine");
  CHECK(sc.space.modes == 64);
  CHECK(sc.space.basis == levylab::Basis::dirichlet_sine);
  CHECK(sc.wiener.q[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sc.wiener.q[3] == doctest::Approx(0.015625).epsilon(1e-15));
  CHECK(sc.jumps.large_jump_rate() == doctest::Approx(0.2928932188134524).epsilon(1e-12));
  CHECK(sc.jumps.sampling_rate() == doctest::Approx(2.4551708789818316).epsilon(1e-12));
  CHECK(sc.jumps.second_moment_small() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sc.jumps.second_moment_large() == doctest::Approx(0.6094757082487301).epsilon(1e-12));
  CHECK(sc.b1_rate == doctest::Approx(9.869604401089358).epsilon(1e-15));
  CHECK(sc.b2_rate == doctest::Approx(9.869604401089358).epsilon(1e-15));
  CHECK(sc.coeffs.delta == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(sc.coeffs.base_amplitude == 0.0);
  auto sg = sc.semigroup();
  CHECK(sg.stability_omega == doctest::Approx(9.869604401089358).epsilon(1e-15));
}

TEST_CASE("builtin linear scenario is the constant-forcing problem") {
  auto sc = levylab::builtin_scenario("linear_test");
  CHECK(sc.coeffs.family == levylab::CoefficientFamily::linear_test);
  CHECK(sc.space.modes == 8);
  CHECK(sc.coeffs.delta == doctest::Approx(0.1).epsilon(1e-15));
  levylab::CoefficientEvaluator ev(sc);
  Vec x(8, 0.3);
  auto vals = ev.values(1.7, x);
  CHECK(vals.g[0] == doctest::Approx(0.1).epsilon(1e-15));
  for (int n = 1; n < 8; ++n) CHECK(vals.g[n] == 0.0);
  for (int n = 0; n < 8; ++n) {
    CHECK(vals.f[n] == 0.0);
    CHECK(vals.noise[n] == 0.0);
  }
}

TEST_CASE("unknown builtin names are rejected") {
  CHECK_THROWS_AS(levylab::builtin_scenario("nope"), std::invalid_argument);
}

TEST_CASE("canonical serialization round-trips both builtins") {
  for (const char* name : {"quasi_periodic_sine", "linear_test"}) {
    auto sc = levylab::builtin_scenario(name);
    auto text = levylab::canonical_json(sc);
    auto back = levylab::load_scenario_json(text);
    CHECK(levylab::canonical_json(back) == text);
    CHECK(levylab::scenario_hash(back) == levylab::scenario_hash(sc));
  }
}

TEST_CASE("hash separates distinct scenarios") {
  auto a = levylab::builtin_scenario("quasi_periodic_sine");
  auto b = a;
  b.coeffs.delta = 0.06;
  CHECK(levylab::scenario_hash(a) != levylab::scenario_hash(b));
}

TEST_CASE("loader rejects malformed documents") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  auto good = levylab::canonical_json(sc);

  SUBCASE("unknown top-level key") {
    auto doc = good;
    doc.insert(doc.rfind('}'), ",\"extra\": 1");
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
  SUBCASE("unknown nested key") {
    std::string doc = R"({
      "name": "x",
      "space": {"basis": "dirichlet_sine", "modes": 4, "bogus": 1},
      "kernels": {"b1_rate": 1.0, "b2_rate": 1.0},
      "wiener": {"q_scale": 0.25},
      "jumps": {"family": "truncated_power_law", "small_cutoff": 0.1, "alpha": 0.5,
                "c_plus": 0.25, "c_minus": 0.25, "y_max": 2.0,
                "direction": "fixed_mode", "direction_mode": 1},
      "coefficients": {"family": "zero", "delta": 0.0}
    })";
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
  SUBCASE("missing required key") {
    std::string doc = R"({
      "name": "x",
      "space": {"basis": "dirichlet_sine", "modes": 4},
      "wiener": {"q_scale": 0.25},
      "jumps": {"family": "truncated_power_law", "small_cutoff": 0.1, "alpha": 0.5,
                "c_plus": 0.25, "c_minus": 0.25, "y_max": 2.0,
                "direction": "fixed_mode", "direction_mode": 1},
      "coefficients": {"family": "zero", "delta": 0.0}
    })";
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
  SUBCASE("diagonal decay shorter than the mode count") {
    std::string doc = R"({
      "name": "x",
      "space": {"basis": "abstract_diagonal", "modes": 3,
                "decay_rates": [1.0, 2.0], "stability_K": 1.0, "stability_omega": 1.0},
      "kernels": {"b1_rate": 1.0, "b2_rate": 1.0},
      "wiener": {"q": [0.1, 0.1, 0.1]},
      "jumps": {"family": "truncated_power_law", "small_cutoff": 0.1, "alpha": 0.5,
                "c_plus": 0.25, "c_minus": 0.25, "y_max": 2.0,
                "direction": "fixed_mode", "direction_mode": 1},
      "coefficients": {"family": "zero", "delta": 0.0}
    })";
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
  SUBCASE("diagonal decay below the claimed stability rate") {
    std::string doc = R"({
      "name": "x",
      "space": {"basis": "abstract_diagonal", "modes": 2,
                "decay_rates": [0.5, 2.0], "stability_K": 1.0, "stability_omega": 1.0},
      "kernels": {"b1_rate": 1.0, "b2_rate": 1.0},
      "wiener": {"q": [0.1, 0.1]},
      "jumps": {"family": "truncated_power_law", "small_cutoff": 0.1, "alpha": 0.5,
                "c_plus": 0.25, "c_minus": 0.25, "y_max": 2.0,
                "direction": "fixed_mode", "direction_mode": 1},
      "coefficients": {"family": "zero", "delta": 0.0}
    })";
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
  SUBCASE("wiener block must choose one spelling") {
    std::string doc = R"({
      "name": "x",
      "space": {"basis": "dirichlet_sine", "modes": 2},
      "kernels": {"b1_rate": 1.0, "b2_rate": 1.0},
      "wiener": {"q": [0.1, 0.1], "q_scale": 0.25},
      "jumps": {"family": "truncated_power_law", "small_cutoff": 0.1, "alpha": 0.5,
                "c_plus": 0.25, "c_minus": 0.25, "y_max": 2.0,
                "direction": "fixed_mode", "direction_mode": 1},
      "coefficients": {"family": "zero", "delta": 0.0}
    })";
    CHECK_THROWS_AS(levylab::load_scenario_json(doc), std::invalid_argument);
  }
}

TEST_CASE("evaluator vanishes at the origin without a base shift") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  levylab::CoefficientEvaluator ev(sc);
  Vec zero(64, 0.0);
  for (double t : {0.0, 0.37, 2.5, -4.0}) {
    auto vals = ev.values(t, zero);
    for (int n = 0; n < 64; ++n) {
      CHECK(vals.g[n] == 0.0);
      CHECK(vals.f[n] == 0.0);
      CHECK(vals.noise[n] == 0.0);
    }
  }
}

TEST_CASE("evaluator matches hand-computed values at the origin with a base shift") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  sc.coeffs.delta = 0.1;
  sc.coeffs.base_amplitude = 1.0;
  levylab::CoefficientEvaluator ev(sc);
  Vec zero(64, 0.0);
  const double t = 1.5707963267948966;  // pi/2
  auto vals = ev.values(t, zero);
  // delta * chi(t) * <1, e_n>; first coefficient of the constant is 2 sqrt(2)/pi
  CHECK(vals.g[0] == doctest::Approx(0.16166918881835943).epsilon(1e-4));
  CHECK(std::fabs(vals.g[1]) < 1e-12);
  CHECK(vals.g[2] == doctest::Approx(0.1 * 1.795693201567481 * 0.3001054387190354).epsilon(1e-3));
  CHECK(vals.f[0] == doctest::Approx(0.12681641651499528).epsilon(1e-4));
  CHECK(vals.noise[0] == doctest::Approx(0.05740642900520119).epsilon(1e-4));
}

TEST_CASE("moduli carry the pinned closed-form values") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  auto m = levylab::scenario_moduli(sc);
  const double t = 1.5707963267948966;
  CHECK(m.g(t) == doctest::Approx(0.008061285185389176).epsilon(1e-12));
  CHECK(m.h(t) == doctest::Approx(0.0002541036129999248).epsilon(1e-12));
  CHECK(m.small_jump(t) == doctest::Approx(0.00033880481733323305).epsilon(1e-12));
  CHECK(m.large_jump(t) == doctest::Approx(0.0006194799180067615).epsilon(1e-12));
  CHECK(m.g.sup() == doctest::Approx(4 * 0.0025).epsilon(1e-12));
  CHECK(m.g.omega1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.g.omega2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK_FALSE(m.g.constant);

  auto lin = levylab::scenario_moduli(levylab::builtin_scenario("linear_test"));
  CHECK(lin.g(0.3) == 0.0);
  CHECK(lin.h(0.3) == 0.0);
  CHECK(lin.g.constant);
}

TEST_CASE("envelope follows the saturating ball bound") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  auto m = levylab::scenario_moduli(sc);
  CHECK(m.envelope(0.5) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(m.envelope(3.0) == doctest::Approx(0.1).epsilon(1e-12));
  sc.coeffs.delta = 0.1;
  sc.coeffs.base_amplitude = 1.0;
  auto mb = levylab::scenario_moduli(sc);
  CHECK(mb.envelope(0.5) == doctest::Approx(0.3).epsilon(1e-12));

  auto lin = levylab::scenario_moduli(levylab::builtin_scenario("linear_test"));
  CHECK(lin.envelope(0.5) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(lin.envelope(7.0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("moduli dominate evaluator differences") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  sc.space.modes = 16;
  sc.wiener.q.resize(16);
  sc.coeffs.delta = 0.3;
  sc.coeffs.base_amplitude = 0.7;
  levylab::CoefficientEvaluator ev(sc);
  auto m = levylab::scenario_moduli(sc);
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> td(-10.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    double t = td(gen);
    Vec x = random_vec(gen, 16, 0.5 + trial * 0.05);
    Vec y = random_vec(gen, 16, 0.3 + trial * 0.04);
    double d = dist(x, y);
    auto vx = ev.values(t, x);
    auto vy = ev.values(t, y);
    CHECK(dist(vx.g, vy.g) <= std::sqrt(m.g(t)) * d + 1e-10);
    CHECK(dist(vx.f, vy.f) <= std::sqrt(m.f(t)) * d + 1e-10);
    double hdiff2 = 0;
    for (int n = 0; n < 16; ++n) {
      double e = vx.noise[n] - vy.noise[n];
      hdiff2 += e * e * sc.wiener.q[n];
    }
    CHECK(hdiff2 <= m.h(t) * d * d + 1e-10);
    // jump integrands share the noise multiplier along the fixed direction
    double dn = std::fabs(vx.noise[0] - vy.noise[0]);
    CHECK(dn * dn * sc.jumps.second_moment_small() <= m.small_jump(t) * d * d + 1e-10);
    CHECK(dn * dn * sc.jumps.second_moment_large() <= m.large_jump(t) * d * d + 1e-10);
  }
}

TEST_CASE("envelope dominates evaluator norms on the ball") {
  auto sc = levylab::builtin_scenario("quasi_periodic_sine");
  sc.space.modes = 16;
  sc.wiener.q.resize(16);
  sc.coeffs.delta = 0.2;
  sc.coeffs.base_amplitude = 0.5;
  levylab::CoefficientEvaluator ev(sc);
  auto m = levylab::scenario_moduli(sc);
  Vec zero(16, 0.0);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> td(-8.0, 8.0);
  double sF = sc.jumps.second_moment_small();
  double sG = sc.jumps.second_moment_large();
  double s1l = sc.jumps.abs_moment_large();
  for (int trial = 0; trial < 60; ++trial) {
    double t = td(gen);
    double r = 0.05 + 0.1 * trial;
    Vec x = random_vec(gen, 16, r);
    auto v = ev.values(t, x);
    double cap = m.envelope(r) + 1e-10;
    CHECK(dist(v.g, zero) <= cap);
    CHECK(dist(v.f, zero) <= cap);
    double h2 = 0;
    for (int n = 0; n < 16; ++n) h2 += v.noise[n] * v.noise[n] * sc.wiener.q[n];
    CHECK(std::sqrt(h2) <= cap);
    double dmode = std::fabs(v.noise[0]);
    CHECK(dmode * std::sqrt(sF) <= cap);
    CHECK(dmode * std::sqrt(sG) <= cap);
    CHECK(dmode * s1l <= cap);
  }
}

}  // TEST_SUITE
