#pragma once

#include <vector>

#include "levylab/lp.hpp"
#include "levylab/solver.hpp"

namespace levylab {

/// Distance from an angle to the nearest multiple of 2 pi.
double circle_gap(double angle);

struct ShiftSequence {
  std::vector<double> shifts;             ///< increasing positive times
  std::vector<double> recurrence_errors;  ///< aligned with shifts
};

/// Candidate return times for quasi-periodic forcing: grid scan of the
/// simultaneous recurrence error max_j circle_gap(omega_j tau), keeping the
/// `count` best candidates separated by at least min_separation (also from
/// zero, so trivially small shifts are excluded).
ShiftSequence find_recurrence_shifts(const std::vector<double>& frequencies, double horizon,
                                     int count, double step = 0.01,
                                     double min_separation = 1.0);

/// Uniform-weight law of the ensemble states at grid time t, projected onto
/// the first m coordinates.
EmpiricalMeasure empirical_law(const std::vector<SolutionPath>& ensemble, double t, int m);

/// Rank correlation with average ranks on ties; zero when either input has
/// no rank variation.
double spearman(const Vec& a, const Vec& b);

struct AutomorphyCell {
  double t;
  double tau;
  double epsilon;
  double beta;
  double beta_control;
};

struct AutomorphyReport {
  std::vector<AutomorphyCell> cells;
  int proj_dim = 0;
  double control_tau = 0;
  double pass_fraction = 0;  ///< share of t where the best shift beats the control
  double correlation = 0;    ///< spearman of (epsilon, beta), control windows included
  double pass_threshold = 0;
  /// pass_fraction at or above threshold, plus either a positive epsilon-beta
  /// correlation or identically vanishing distances
  bool passed = false;
};

/// Compare laws along candidate recurrence shifts against a deliberately
/// misaligned control window.  shifted[n] must cover t + shifts[n] and the
/// control ensemble t + control_tau for every t in t_grid; all ensembles
/// need equal path counts.  control_epsilon is the recurrence error of the
/// control shift; its (epsilon, beta) pairs join the correlation pool.
AutomorphyReport automorphy_profile(const std::vector<SolutionPath>& base,
                                    const std::vector<std::vector<SolutionPath>>& shifted,
                                    const std::vector<SolutionPath>& control,
                                    double control_tau, double control_epsilon,
                                    const ShiftSequence& shifts,
                                    const std::vector<double>& t_grid, int m,
                                    double pass_threshold = 0.7);

}  // namespace levylab
