#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levylab/io.hpp"
#include "levylab/metrics.hpp"
#include "levylab/scenario.hpp"
#include "levylab/solver.hpp"

namespace levylab {

/// Tones that actually enter the time dependence of the coefficient maps.
std::vector<double> active_tones(const Scenario& sc);

/// Same result as ensemble_run for any worker count; path index i always
/// consumes stream (seed, i, salt).
EnsembleResult ensemble_run_parallel(const Scenario& sc, const GridSpec& grid, int n_paths,
                                     std::uint64_t seed, SolveMode mode, double tol,
                                     int max_iter, std::uint64_t salt, int workers);

struct StudyConfig {
  int n_paths = 64;
  double t_start = 0.0;
  double window = 6.0;
  double dt = 0.01;
  double burn_in = 1.0;
  double horizon = 200.0;
  int shift_count = 4;
  int t_samples = 12;
  int proj_dim = 8;
  double control_offset = 0.5;
  double pass_threshold = 0.7;
  std::uint64_t seed = 1;
  SolveMode mode = SolveMode::forward;
  double tol = 1e-6;
  int max_iter = 50;
  int workers = 1;
};

struct StudyResult {
  AutomorphyReport report;
  ShiftSequence shifts;
  double control_tau = 0;
  double control_epsilon = 0;
  std::vector<double> t_grid;
};

/// Simulate the base window, each shifted window, and a deliberately
/// misaligned control window with common random numbers, then compare laws.
StudyResult run_automorphy_study(const Scenario& sc, const StudyConfig& cfg);

std::vector<ReportRow> study_rows(const StudyResult& res);

// command implementations backing the CLI; each returns the process exit code
int cmd_check(const Scenario& sc, const std::string& out_dir);
int cmd_simulate(const Scenario& sc, const GridSpec& grid, int n_paths, std::uint64_t seed,
                 std::uint64_t salt, SolveMode mode, double tol, int max_iter, int workers,
                 bool check_convergence, const std::string& out_dir);
int cmd_simulate_from_manifest(const std::string& manifest_file, const std::string& out_dir);
int cmd_automorphy(const Scenario& sc, const StudyConfig& cfg, const std::string& out_dir);
int cmd_automorphy_dirs(const std::string& base_dir,
                        const std::vector<std::string>& shifted_dirs,
                        const std::string& control_dir, int proj_dim, int t_samples,
                        double pass_threshold, const std::string& out_dir);
int cmd_report(const std::string& in_dir, const std::string& out_dir);

}  // namespace levylab
