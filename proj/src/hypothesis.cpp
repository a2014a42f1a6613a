#include "levylab/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace levylab {

KernelNorms kernel_norms(const Scenario& sc) {
  return {1.0 / sc.b1_rate, 1.0 / sc.b2_rate, 1.0 / (2.0 * sc.b2_rate)};
}

double theta_constant(const KernelNorms& kn, double large_jump_rate) {
  return std::max({1.0, kn.b1_l1 * kn.b1_l1, 4.0 * kn.b2_l2sq,
                   2.0 * large_jump_rate * kn.b2_l1 * kn.b2_l1});
}

namespace {

// int_{-inf}^t exp(-a(t-s)) cos(ks) ds = sin(kt + phase)/sqrt(a^2+k^2)
double damped_cos(double a, double k, double t) {
  return (a * std::cos(k * t) + k * std::sin(k * t)) / (a * a + k * k);
}

}  // namespace

double damped_integral_at(const QuadraticModulus& m, double a, double t) {
  if (!(a > 0.0)) throw std::invalid_argument("damping rate must be positive");
  if (m.constant) return m.scale / a;
  // chi^2 = 1 - cos(2 w1 s)/2 - cos(2 w2 s)/2 + cos((w1-w2) s) - cos((w1+w2) s)
  double v = 1.0 / a - 0.5 * damped_cos(a, 2.0 * m.omega1, t) -
             0.5 * damped_cos(a, 2.0 * m.omega2, t) +
             damped_cos(a, m.omega1 - m.omega2, t) -
             damped_cos(a, m.omega1 + m.omega2, t);
  return m.scale * v;
}

double damped_sup_integral(const QuadraticModulus& m, double a) {
  if (m.constant) return m.scale / a;
  // long-window grid supremum plus a certified subgrid margin from the
  // derivative amplitudes of the four oscillatory parts
  const double h = 0.01;
  const double span = 200.0;
  double best = 0.0;
  const long n = long(2 * span / h);
  for (long i = 0; i <= n; ++i) {
    double t = -span + h * i;
    best = std::max(best, damped_integral_at(m, a, t));
  }
  auto slope = [a](double k) { return std::fabs(k) / std::sqrt(a * a + k * k); };
  double deriv = m.scale * (0.5 * slope(2 * m.omega1) + 0.5 * slope(2 * m.omega2) +
                            slope(m.omega1 - m.omega2) + slope(m.omega1 + m.omega2));
  return best + 0.5 * deriv * h;
}

ContractionBreakdown contraction_breakdown(const Scenario& sc) {
  auto mod = scenario_moduli(sc);
  auto sg = sc.semigroup();
  auto kn = kernel_norms(sc);
  const double b = sc.jumps.large_jump_rate();
  ContractionBreakdown out;
  out.L_g = damped_sup_integral(mod.g, sg.stability_omega);
  out.L_f = damped_sup_integral(mod.f, sc.b1_rate);
  out.L_h = damped_sup_integral(mod.h, 2.0 * sc.b2_rate);
  out.L_F = damped_sup_integral(mod.small_jump, 2.0 * sc.b2_rate);
  out.L_G = damped_sup_integral(mod.large_jump, 2.0 * sc.b2_rate);
  out.theta = theta_constant(kn, b);
  const double K = sg.stability_K;
  const double w = sg.stability_omega;
  out.vartheta = 10.0 * K * K / (w * w) *
                 (w * out.L_g + out.L_f * kn.b1_l1 + out.L_h + out.L_F +
                  2.0 * (1.0 + b * kn.b2_l1) * out.L_G);
  return out;
}

double contraction_bound(const Scenario& sc) { return contraction_breakdown(sc).vartheta; }

double critical_delta(const Scenario& sc, double tol) {
  auto value = [&sc](double d) {
    auto s2 = sc;
    s2.coeffs.delta = d;
    return contraction_bound(s2);
  };
  double hi = std::max(sc.coeffs.delta, 1e-3);
  int doublings = 0;
  while (value(hi) < 1.0) {
    hi *= 2.0;
    if (++doublings > 60) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = value(mid);
    if (std::fabs(v - 1.0) <= tol) return mid;
    (v < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec default_radius_grid() {
  Vec grid(241);
  for (int i = 0; i < 241; ++i) grid[i] = std::pow(10.0, -3.0 + 6.0 * i / 240.0);
  return grid;
}

RadiusCheck radius_budget(const Scenario& sc, const Vec& r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("radius grid must not be empty");
  auto mod = scenario_moduli(sc);
  auto sg = sc.semigroup();
  const double theta = theta_constant(kernel_norms(sc), sc.jumps.large_jump_rate());
  const double c = sg.stability_omega * sg.stability_omega /
                   (20.0 * theta * sg.stability_K * sg.stability_K);
  RadiusCheck out;
  out.upward_closed = true;
  bool seen_feasible = false;
  double prev = -std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    if (r < prev) throw std::invalid_argument("radius grid must be nondecreasing");
    prev = r;
    bool ok = mod.envelope(r) <= c * r;
    if (ok && !seen_feasible) {
      seen_feasible = true;
      out.feasible = true;
      out.r_min = r;
      out.slack_at_rmin = c * r - mod.envelope(r);
    }
    if (!ok && seen_feasible) out.upward_closed = false;
  }
  return out;
}

namespace {

Vec gaussian_vec(std::mt19937& gen, int n, double radius) {
  std::normal_distribution<double> nd;
  Vec v(n);
  double s = 0;
  for (auto& x : v) {
    x = nd(gen);
    s += x * x;
  }
  double scale = radius / std::max(std::sqrt(s), 1e-12);
  for (auto& x : v) x *= scale;
  return v;
}

double sqdist(const Vec& a, const Vec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

double max_lipschitz_violation(const Scenario& sc, const ModulusSet& m,
                               std::uint64_t seed, int trials) {
  CoefficientEvaluator ev(sc);
  const int modes = sc.space.modes;
  std::mt19937 gen{std::uint32_t(seed)};
  std::uniform_real_distribution<double> td(-10.0, 10.0);
  std::uniform_real_distribution<double> rd(0.1, 2.0);
  const double sF = sc.jumps.second_moment_small();
  const double sG = sc.jumps.second_moment_large();
  double worst = 0.0;
  auto excess = [&worst](double lhs2, double rhs2) {
    double v = lhs2 / (rhs2 + 1e-300) - 1.0;
    if (v > worst) worst = v;
  };
  for (int trial = 0; trial < trials; ++trial) {
    double t = td(gen);
    Vec x = gaussian_vec(gen, modes, rd(gen));
    Vec y = gaussian_vec(gen, modes, rd(gen));
    double d2 = sqdist(x, y);
    auto vx = ev.values(t, x);
    auto vy = ev.values(t, y);
    excess(sqdist(vx.g, vy.g), m.g(t) * d2);
    excess(sqdist(vx.f, vy.f), m.f(t) * d2);
    double h2 = 0, dmax = 0;
    for (int n = 0; n < modes; ++n) {
      double e = vx.noise[n] - vy.noise[n];
      h2 += e * e * sc.wiener.q[n];
      dmax = std::max(dmax, std::fabs(e));
    }
    excess(h2, m.h(t) * d2);
    excess(dmax * dmax * sF, m.small_jump(t) * d2);
    excess(dmax * dmax * sG, m.large_jump(t) * d2);
  }
  return worst;
}

HypothesisReport check_hypotheses(const Scenario& sc, std::uint64_t seed, int lip_trials) {
  sc.validate();
  HypothesisReport rep;

  auto sg = sc.semigroup();
  rep.stability_K = sg.stability_K;
  rep.stability_omega = sg.stability_omega;
  std::mt19937 gen{std::uint32_t(seed)};
  double excess = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Vec v = gaussian_vec(gen, sc.space.modes, 1.0);
    double t = 3.0 * trial / 199.0;
    Vec tv = sg.apply(t, v);
    double lhs = std::sqrt(sqdist(tv, Vec(v.size(), 0.0)));
    double rhs = sg.stability_K * std::exp(-sg.stability_omega * t);
    excess = std::max(excess, lhs - rhs);
  }
  rep.semigroup_max_excess = excess;
  rep.semigroup_ok = excess <= 1e-12;

  rep.norms = kernel_norms(sc);
  rep.theta = theta_constant(rep.norms, sc.jumps.large_jump_rate());
  rep.kernels_ok = std::isfinite(rep.norms.b1_l1) && std::isfinite(rep.norms.b2_l1) &&
                   std::isfinite(rep.norms.b2_l2sq) && std::isfinite(rep.theta);

  auto breakdown = contraction_breakdown(sc);
  rep.L_g = breakdown.L_g;
  rep.L_f = breakdown.L_f;
  rep.L_h = breakdown.L_h;
  rep.L_F = breakdown.L_F;
  rep.L_G = breakdown.L_G;
  rep.lipschitz_excess = max_lipschitz_violation(sc, scenario_moduli(sc), seed, lip_trials);
  rep.moduli_ok = rep.lipschitz_excess < 1e-8 && std::isfinite(breakdown.L_g) &&
                  std::isfinite(breakdown.L_G);

  rep.vartheta = breakdown.vartheta;
  rep.contraction_ok = rep.vartheta < 1.0;
  rep.critical_delta = critical_delta(sc);

  auto rc = radius_budget(sc, default_radius_grid());
  rep.radius_ok = rc.feasible && rc.upward_closed;
  rep.r_min = rc.r_min;
  return rep;
}

}  // namespace levylab
