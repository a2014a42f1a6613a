#pragma once

#include <map>
#include <string>
#include <vector>

#include "levylab/hypothesis.hpp"
#include "levylab/metrics.hpp"
#include "levylab/scenario.hpp"
#include "levylab/solver.hpp"

namespace levylab {

/// States on the grid as "t,c1,...,cN" rows, printed with 17 significant
/// digits so a read-back reproduces every double bit for bit.
void write_path_csv(const std::string& file, const SolutionPath& path);
SolutionPath read_path_csv(const std::string& file);

/// Everything needed to reproduce the data files of a run byte for byte.
/// Timings are informational and excluded from that guarantee.
struct RunManifest {
  std::string kind;  // check | simulate | automorphy
  std::string tool_version;
  std::map<std::string, int> module_versions;
  std::string scenario_canonical;   ///< canonical scenario JSON text
  std::string scenario_fingerprint; ///< hex of scenario_hash
  std::uint64_t seed = 0;
  std::uint64_t salt = 0;
  GridSpec grid;
  int n_paths = 0;
  std::string mode = "picard";
  double tol = 1e-6;
  int max_iter = 50;
  int workers = 1;

  // automorphy runs only
  double horizon = 0;
  int shift_count = 0;
  int t_samples = 0;
  int proj_dim = 0;
  double control_offset = 0;
  double pass_threshold = 0;

  std::vector<std::string> outputs;
  std::map<std::string, double> timings_ms;

  bool convergence_checked = false;
  double convergence_ratio = 0;

  static RunManifest base(const std::string& kind, const Scenario& sc);
};

void write_manifest(const std::string& file, const RunManifest& m);
RunManifest read_manifest(const std::string& file);

std::string hypothesis_report_text(const Scenario& sc, const HypothesisReport& rep);

/// One comparison cell of the distribution study.
struct ReportRow {
  double t, tau, epsilon, beta;
};

void write_automorphy_csv(const std::string& file, const std::vector<ReportRow>& rows);
std::vector<ReportRow> read_automorphy_csv(const std::string& file);

std::string automorphy_summary_text(const Scenario& sc, const AutomorphyReport& rep,
                                    double control_epsilon);
/// Static scatter chart of beta against the recurrence error.
std::string automorphy_svg(const std::vector<ReportRow>& rows);

std::string fingerprint_hex(std::uint64_t h);

}  // namespace levylab
