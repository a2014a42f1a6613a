#include "levylab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace levylab {

namespace {
constexpr double kTwoPi = 6.283185307179586;
}

double circle_gap(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0) r += kTwoPi;
  return std::min(r, kTwoPi - r);
}

ShiftSequence find_recurrence_shifts(const std::vector<double>& frequencies, double horizon,
                                     int count, double step, double min_separation) {
  if (frequencies.empty()) throw std::invalid_argument("no frequencies");
  if (!(horizon > 0) || !(step > 0) || count < 1) {
    throw std::invalid_argument("bad shift search parameters");
  }
  struct Candidate {
    double tau;
    double eps;
  };
  std::vector<Candidate> cands;
  for (long k = 1; k * step <= horizon; ++k) {
    double tau = k * step;
    if (tau < min_separation) continue;
    double eps = 0;
    for (double w : frequencies) eps = std::max(eps, circle_gap(w * tau));
    cands.push_back({tau, eps});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.eps < b.eps; });
  std::vector<Candidate> picked;
  for (const auto& c : cands) {
    if ((int)picked.size() == count) break;
    bool ok = true;
    for (const auto& p : picked) {
      if (std::fabs(p.tau - c.tau) < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) picked.push_back(c);
  }
  std::sort(picked.begin(), picked.end(),
            [](const Candidate& a, const Candidate& b) { return a.tau < b.tau; });
  ShiftSequence out;
  for (const auto& p : picked) {
    out.shifts.push_back(p.tau);
    out.recurrence_errors.push_back(p.eps);
  }
  return out;
}

EmpiricalMeasure empirical_law(const std::vector<SolutionPath>& ensemble, double t, int m) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  std::vector<Vec> samples;
  samples.reserve(ensemble.size());
  for (const auto& path : ensemble) {
    if (path.grid.size() < 2 || path.states.size() != path.grid.size()) {
      throw std::invalid_argument("malformed path");
    }
    double dt = path.grid[1] - path.grid[0];
    long idx = std::lround((t - path.grid.front()) / dt);
    if (idx < 0 || idx >= (long)path.grid.size() || std::fabs(path.grid[idx] - t) > 1e-6) {
      throw std::invalid_argument("time off the path grid");
    }
    const Vec& x = path.states[idx];
    if (m < 1 || m > (int)x.size()) throw std::invalid_argument("bad projection dimension");
    samples.emplace_back(x.begin(), x.begin() + m);
  }
  return EmpiricalMeasure::from_samples(samples);
}

namespace {

Vec average_ranks(const Vec& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  Vec ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double r = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("bad rank inputs");
  Vec ra = average_ranks(a);
  Vec rb = average_ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= ra.size();
  mb /= rb.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sxy += (ra[i] - ma) * (rb[i] - mb);
    sxx += (ra[i] - ma) * (ra[i] - ma);
    syy += (rb[i] - mb) * (rb[i] - mb);
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

AutomorphyReport automorphy_profile(const std::vector<SolutionPath>& base,
                                    const std::vector<std::vector<SolutionPath>>& shifted,
                                    const std::vector<SolutionPath>& control,
                                    double control_tau, double control_epsilon,
                                    const ShiftSequence& shifts,
                                    const std::vector<double>& t_grid, int m,
                                    double pass_threshold) {
  if (shifted.size() != shifts.shifts.size() ||
      shifts.shifts.size() != shifts.recurrence_errors.size()) {
    throw std::invalid_argument("shift ensembles and shift list disagree");
  }
  if (shifted.empty() || t_grid.empty()) throw std::invalid_argument("nothing to compare");
  for (const auto& ens : shifted) {
    if (ens.size() != base.size()) throw std::invalid_argument("ensemble sizes differ");
  }
  if (control.size() != base.size()) throw std::invalid_argument("ensemble sizes differ");

  AutomorphyReport rep;
  rep.proj_dim = m;
  rep.control_tau = control_tau;
  rep.pass_threshold = pass_threshold;
  Vec eps_pool, beta_pool;
  int n_pass = 0;
  for (double t : t_grid) {
    auto ref = empirical_law(base, t, m);
    double ctrl = bl_distance(ref, empirical_law(control, t + control_tau, m));
    eps_pool.push_back(control_epsilon);
    beta_pool.push_back(ctrl);
    double best = 1e300;
    for (std::size_t n = 0; n < shifted.size(); ++n) {
      double tau = shifts.shifts[n];
      double beta = bl_distance(ref, empirical_law(shifted[n], t + tau, m));
      rep.cells.push_back({t, tau, shifts.recurrence_errors[n], beta, ctrl});
      eps_pool.push_back(shifts.recurrence_errors[n]);
      beta_pool.push_back(beta);
      best = std::min(best, beta);
    }
    if (best <= ctrl + 1e-12) ++n_pass;
  }
  rep.pass_fraction = double(n_pass) / t_grid.size();
  rep.correlation = eps_pool.size() >= 2 ? spearman(eps_pool, beta_pool) : 0.0;
  double beta_max = 0.0;
  for (double b : beta_pool) beta_max = std::max(beta_max, b);
  // degenerate laws (all distances zero) leave no ranks to correlate but
  // still witness the recurrence perfectly
  rep.passed =
      rep.pass_fraction >= pass_threshold && (rep.correlation > 0.0 || beta_max <= 1e-12);
  return rep;
}

}  // namespace levylab
