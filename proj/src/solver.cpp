#include "levylab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace levylab {

void GridSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step size must be positive");
  }
  if (!(t_end > t_start)) throw std::invalid_argument("time window is empty");
  if (!(burn_in >= 0.0) || !std::isfinite(burn_in)) {
    throw std::invalid_argument("burn-in must be nonnegative");
  }
  double k = (t_end - t_start) / dt;
  if (std::fabs(k - double(std::lround(k))) > 1e-6) {
    throw std::invalid_argument("window length must be a whole number of steps");
  }
}

int GridSpec::burn_steps() const { return int(std::ceil(burn_in / dt - 1e-9)); }

int GridSpec::main_steps() const { return int(std::lround((t_end - t_start) / dt)); }

std::vector<double> GridSpec::times() const {
  validate();
  int bs = burn_steps();
  std::vector<double> ts(std::size_t(total_steps()) + 1);
  for (std::size_t j = 0; j < ts.size(); ++j) ts[j] = t_start + (double(j) - bs) * dt;
  return ts;
}

namespace {

/// Precomputed per-step factors for one (scenario, grid, noise) triple.  One
/// sweep advances the outer semigroup convolution with exact per-mode decay
/// and keeps four exponentially damped memory states: the drift kernel
/// integral, the Wiener kernel integral, and the compensated small-jump and
/// raw large-jump integrals.  All integrands are frozen at the left endpoint
/// of each cell, so a sweep never reads the state it is about to write.
struct Stepper {
  const GridSpec& grid;
  const LevyPathSegment& noise;
  int modes;
  int N;
  std::vector<double> times;
  Vec E, Phi;           // outer decay and mass per mode
  double bf, phi1, bh;  // kernel decay factors and drift-kernel mass
  Vec drift;
  CoefficientEvaluator eval;

  Stepper(const Scenario& sc, const GridSpec& g, const LevyPathSegment& seg)
      : grid(g), noise(seg), eval(sc) {
    g.validate();
    sc.validate();
    modes = sc.space.modes;
    N = g.total_steps();
    times = g.times();
    if (seg.steps != N || seg.modes != modes || std::fabs(seg.dt - g.dt) > 1e-12 ||
        std::fabs(seg.t0 - g.grid_start()) > 1e-9 ||
        seg.wiener.size() != std::size_t(N) * modes) {
      throw std::invalid_argument("noise segment does not match the grid");
    }
    auto sg = sc.semigroup();
    E.resize(modes);
    Phi.resize(modes);
    for (int n = 0; n < modes; ++n) {
      double lam = sg.decay_rates[n];
      E[n] = std::exp(-lam * g.dt);
      Phi[n] = (1.0 - E[n]) / lam;
    }
    bf = std::exp(-sc.b1_rate * g.dt);
    phi1 = (1.0 - bf) / sc.b1_rate;
    bh = std::exp(-sc.b2_rate * g.dt);
    drift = compensator_drift(sc.jumps, modes);
  }

  /// input == nullptr evaluates the coefficients along the path being built.
  SolutionPath run(const SolutionPath* input, const Vec* start) const {
    SolutionPath out;
    out.grid = times;
    out.states.assign(std::size_t(N) + 1, Vec(modes, 0.0));
    if (start) out.states[0] = *start;
    Vec yf(modes, 0.0), yh(modes, 0.0), ys(modes, 0.0), yl(modes, 0.0);
    std::size_t is = 0, il = 0;
    for (int j = 0; j < N; ++j) {
      const Vec& at = input ? input->states[j] : out.states[j];
      auto cv = eval.values(times[j], at);
      const Vec& cur = out.states[j];
      Vec& next = out.states[j + 1];
      for (int n = 0; n < modes; ++n) {
        next[n] = E[n] * cur[n] + Phi[n] * (cv.g[n] + yf[n] + yh[n] + ys[n] + yl[n]);
      }
      const double* dw = noise.wiener_row(j);
      for (int n = 0; n < modes; ++n) {
        yf[n] = bf * yf[n] + phi1 * cv.f[n];
        yh[n] = bh * yh[n] + cv.noise[n] * dw[n];
        ys[n] = bh * ys[n] - grid.dt * cv.noise[n] * drift[n];
        yl[n] = bh * yl[n];
      }
      while (is < noise.small_events.size() && noise.small_events[is].cell == j) {
        const JumpEvent& ev = noise.small_events[is++];
        ys[ev.mode] += cv.noise[ev.mode] * ev.size;
      }
      while (il < noise.large_events.size() && noise.large_events[il].cell == j) {
        const JumpEvent& ev = noise.large_events[il++];
        yl[ev.mode] += cv.noise[ev.mode] * ev.size;
      }
    }
    return out;
  }
};

}  // namespace

SolutionPath apply_lambda(const Scenario& sc, const GridSpec& grid, const SolutionPath& x,
                          const LevyPathSegment& noise) {
  Stepper st(sc, grid, noise);
  if (x.states.size() != std::size_t(st.N) + 1 || x.grid.size() != x.states.size()) {
    throw std::invalid_argument("input path does not match the grid");
  }
  for (const Vec& v : x.states) {
    if (int(v.size()) != st.modes) {
      throw std::invalid_argument("input path has the wrong mode count");
    }
  }
  return st.run(&x, nullptr);
}

PicardResult picard_solve(const Scenario& sc, const GridSpec& grid,
                          const LevyPathSegment& noise, double tol, int max_iter) {
  Stepper st(sc, grid, noise);
  SolutionPath cur;
  cur.grid = st.times;
  cur.states.assign(std::size_t(st.N) + 1, Vec(st.modes, 0.0));
  IterationTrace trace;
  for (int k = 0; k < max_iter; ++k) {
    SolutionPath next = st.run(&cur, nullptr);
    double d = path_distance(next, cur);
    trace.distances.push_back(d);
    trace.iterations = k + 1;
    cur = std::move(next);
    if (d <= tol) {
      trace.converged = true;
      return {std::move(cur), std::move(trace)};
    }
  }
  throw ConvergenceError("fixed-point sweeps missed their tolerance", trace);
}

SolutionPath simulate_forward(const Scenario& sc, const Vec& x_a, const GridSpec& grid,
                              const LevyPathSegment& noise) {
  Stepper st(sc, grid, noise);
  if (int(x_a.size()) != st.modes) {
    throw std::invalid_argument("start state has the wrong mode count");
  }
  return st.run(nullptr, &x_a);
}

EnsembleResult ensemble_run(const Scenario& sc, const GridSpec& grid, int n_paths,
                            std::uint64_t seed, SolveMode mode, double tol, int max_iter,
                            std::uint64_t salt) {
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  grid.validate();
  sc.validate();
  EnsembleResult res;
  res.paths.reserve(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    SegmentRequest req;
    req.t0 = grid.grid_start();
    req.dt = grid.dt;
    req.steps = grid.total_steps();
    req.seed = seed;
    req.path = std::uint64_t(i);
    req.salt = salt;
    LevyPathSegment seg = sample_segment(sc.wiener, sc.jumps, req);
    NoiseRef ref{seed, std::uint64_t(i), salt};
    if (mode == SolveMode::picard) {
      try {
        PicardResult pr = picard_solve(sc, grid, seg, tol, max_iter);
        pr.path.noise_ref = ref;
        res.paths.push_back(std::move(pr.path));
        res.traces.push_back(std::move(pr.trace));
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(e.what(), e.trace, i);
      }
    } else {
      SolutionPath p = simulate_forward(sc, Vec(sc.space.modes, 0.0), grid, seg);
      p.noise_ref = ref;
      res.paths.push_back(std::move(p));
    }
  }
  return res;
}

double path_distance(const SolutionPath& a, const SolutionPath& b) {
  if (a.grid.size() != b.grid.size() || a.states.size() != b.states.size() ||
      a.grid.size() != a.states.size()) {
    throw std::invalid_argument("paths live on different grids");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < a.states.size(); ++j) {
    if (std::fabs(a.grid[j] - b.grid[j]) > 1e-9) {
      throw std::invalid_argument("paths live on different grids");
    }
    d = std::max(d, vector_dist(a.states[j], b.states[j]));
  }
  return d;
}

}  // namespace levylab
