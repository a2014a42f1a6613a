#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "levylab/noise.hpp"
#include "levylab/scenario.hpp"

namespace levylab {

/// Uniform grid over [t_start, t_end] with a burn-in window prepended; the
/// burn-in realizes the infinite lower integration limits and is rounded up
/// to a whole number of steps.
struct GridSpec {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 0.01;
  double burn_in = 0.0;

  void validate() const;
  int burn_steps() const;
  int main_steps() const;
  int total_steps() const { return burn_steps() + main_steps(); }
  double grid_start() const { return t_start - burn_steps() * dt; }
  std::vector<double> times() const;
};

struct NoiseRef {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint64_t salt = 0;
};

struct SolutionPath {
  std::vector<double> grid;
  std::vector<Vec> states;
  NoiseRef noise_ref;
};

struct IterationTrace {
  std::vector<double> distances;  ///< sup-over-grid step distances per sweep
  int iterations = 0;
  bool converged = false;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, IterationTrace trace, int path_index = -1)
      : std::runtime_error(what), trace(std::move(trace)), path_index(path_index) {}
  IterationTrace trace;
  int path_index;
};

/// One application of the path-to-path integral operator: semigroup
/// convolution of the forcing plus the four double-convolution terms, with
/// left-point integrand evaluation and recursively maintained inner kernel
/// states.
SolutionPath apply_lambda(const Scenario& sc, const GridSpec& grid, const SolutionPath& x,
                          const LevyPathSegment& noise);

struct PicardResult {
  SolutionPath path;
  IterationTrace trace;
};

PicardResult picard_solve(const Scenario& sc, const GridSpec& grid,
                          const LevyPathSegment& noise, double tol = 1e-6,
                          int max_iter = 50);

/// Explicit time stepping of the initial-value form from state x_a at the
/// grid start.
SolutionPath simulate_forward(const Scenario& sc, const Vec& x_a, const GridSpec& grid,
                              const LevyPathSegment& noise);

enum class SolveMode { picard, forward };

struct EnsembleResult {
  std::vector<SolutionPath> paths;
  std::vector<IterationTrace> traces;  ///< empty entries in forward mode
};

/// Independent paths driven by streams (seed, 0..n-1, salt); deterministic
/// regardless of scheduling.
EnsembleResult ensemble_run(const Scenario& sc, const GridSpec& grid, int n_paths,
                            std::uint64_t seed, SolveMode mode = SolveMode::picard,
                            double tol = 1e-6, int max_iter = 50, std::uint64_t salt = 0);

/// Sup over grid points of the state distance between two paths on a shared
/// grid.
double path_distance(const SolutionPath& a, const SolutionPath& b);

}  // namespace levylab
