#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "levylab/runner.hpp"

using namespace levylab;

namespace {

Scenario resolve_scenario(const std::string& source, const double* delta_override,
                          const double* base_override) {
  Scenario sc;
  if (source.rfind("builtin:", 0) == 0) {
    sc = builtin_scenario(source.substr(8));
  } else {
    sc = load_scenario_file(source);
  }
  if (delta_override) sc.coeffs.delta = *delta_override;
  if (base_override) sc.coeffs.base_amplitude = *base_override;
  sc.validate();
  return sc;
}

std::string default_out(const char* leaf) {
  const char* root = std::getenv("LEVYLAB_OUT");
  std::string r = (root && *root) ? root : "levylab_out";
  return r + "/" + leaf;
}

SolveMode parse_mode(const std::string& s) {
  if (s == "picard") return SolveMode::picard;
  if (s == "forward") return SolveMode::forward;
  throw std::invalid_argument("mode must be 'picard' or 'forward', got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "levylab: simulate a damped spectral system driven by quasi-periodic forcing "
      "and jump noise, check its well-posedness constants, and measure how closely "
      "the path laws recur along near-period shifts"};
  app.require_subcommand(1);

  std::string scenario_spec;
  double delta = 0, base = 0;
  std::string out_dir;

  auto* check = app.add_subcommand("check", "evaluate the well-posedness constants");
  check->add_option("scenario", scenario_spec,
                    "scenario file, or builtin:NAME for a built-in one")
      ->required();
  check->add_option("--delta", delta, "override the forcing amplitude");
  check->add_option("--base", base, "override the state-independent amplitude floor");
  check->add_option("--out", out_dir, "also write report and manifest here");

  int n_paths = 8;
  double t0 = 0.0, t1 = 1.0, dt = 0.01, burn_in = 1.0;
  std::uint64_t seed = 1, salt = 0;
  std::string mode_str = "picard";
  double tol = 1e-6;
  int max_iter = 50, workers = 1;
  bool check_conv = false;
  std::string from_manifest;

  auto* sim = app.add_subcommand("simulate", "run an ensemble and write path files");
  sim->add_option("scenario", scenario_spec, "scenario file or builtin:NAME");
  sim->add_option("--paths", n_paths, "ensemble size");
  sim->add_option("--t0", t0, "window start");
  sim->add_option("--t1", t1, "window end");
  sim->add_option("--dt", dt, "step size");
  sim->add_option("--burn-in", burn_in, "settling span simulated before the window");
  sim->add_option("--seed", seed, "stream seed");
  sim->add_option("--salt", salt, "stream salt");
  sim->add_option("--mode", mode_str, "picard or forward");
  sim->add_option("--tol", tol, "fixed-point tolerance");
  sim->add_option("--max-iter", max_iter, "fixed-point sweep cap");
  sim->add_option("--workers", workers, "worker threads");
  sim->add_flag("--check-convergence", check_conv,
                "record a step-halving ratio for path 0 in the manifest");
  sim->add_option("--from-manifest", from_manifest,
                  "replay an earlier run from its manifest");
  sim->add_option("--delta", delta, "override the forcing amplitude");
  sim->add_option("--base", base, "override the state-independent amplitude floor");
  sim->add_option("--out", out_dir, "output directory");

  double window = 6.0, horizon = 200.0, control_offset = 0.5, threshold = 0.7;
  int shift_count = 4, t_samples = 12, proj_dim = 8;
  std::string base_dir, control_dir;
  std::vector<std::string> shifted_dirs;
  std::string amode_str = "forward";

  auto* amo = app.add_subcommand(
      "automorphy", "compare path laws across near-period shifts of the window");
  amo->add_option("scenario", scenario_spec, "scenario file or builtin:NAME");
  amo->add_option("--paths", n_paths, "ensemble size");
  amo->add_option("--t0", t0, "window start");
  amo->add_option("--window", window, "window length");
  amo->add_option("--dt", dt, "step size");
  amo->add_option("--burn-in", burn_in, "settling span simulated before the window");
  amo->add_option("--horizon", horizon, "shift search horizon");
  amo->add_option("--shifts", shift_count, "number of shifts to test");
  amo->add_option("--t-samples", t_samples, "sample times across the window");
  amo->add_option("--proj-dim", proj_dim, "leading coordinates compared");
  amo->add_option("--control-offset", control_offset,
                  "misalignment added to the best shift for the control window");
  amo->add_option("--threshold", threshold, "required fraction of winning sample times");
  amo->add_option("--seed", seed, "stream seed");
  amo->add_option("--mode", amode_str, "picard or forward");
  amo->add_option("--tol", tol, "fixed-point tolerance");
  amo->add_option("--max-iter", max_iter, "fixed-point sweep cap");
  amo->add_option("--workers", workers, "worker threads");
  amo->add_option("--delta", delta, "override the forcing amplitude");
  amo->add_option("--base", base, "override the state-independent amplitude floor");
  amo->add_option("--base-dir", base_dir, "read the base ensemble from this directory");
  amo->add_option("--shifted-dir", shifted_dirs,
                  "read a shifted ensemble from this directory (repeatable)");
  amo->add_option("--control-dir", control_dir,
                  "read the control ensemble from this directory");
  amo->add_option("--out", out_dir, "output directory");

  std::string in_dir;
  auto* rep = app.add_subcommand("report", "re-render artifacts from an automorphy run");
  rep->add_option("--in", in_dir, "directory holding automorphy.csv")->required();
  rep->add_option("--out", out_dir, "where to write the chart (defaults to --in)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const double* dp = nullptr;
    const double* bp = nullptr;

    if (app.got_subcommand(check)) {
      if (check->count("--delta")) dp = &delta;
      if (check->count("--base")) bp = &base;
      return cmd_check(resolve_scenario(scenario_spec, dp, bp), out_dir);
    }

    if (app.got_subcommand(sim)) {
      if (!from_manifest.empty()) {
        return cmd_simulate_from_manifest(
            from_manifest, out_dir.empty() ? default_out("replay") : out_dir);
      }
      if (scenario_spec.empty()) {
        std::fprintf(stderr, "simulate needs a scenario or --from-manifest\n");
        return 2;
      }
      if (sim->count("--delta")) dp = &delta;
      if (sim->count("--base")) bp = &base;
      Scenario sc = resolve_scenario(scenario_spec, dp, bp);
      GridSpec grid{t0, t1, dt, burn_in};
      return cmd_simulate(sc, grid, n_paths, seed, salt, parse_mode(mode_str), tol,
                          max_iter, workers, check_conv,
                          out_dir.empty() ? default_out("simulate") : out_dir);
    }

    if (app.got_subcommand(amo)) {
      std::string dest = out_dir.empty() ? default_out("automorphy") : out_dir;
      if (!base_dir.empty() || !shifted_dirs.empty() || !control_dir.empty()) {
        if (base_dir.empty() || shifted_dirs.empty() || control_dir.empty()) {
          std::fprintf(stderr,
                       "directory mode needs --base-dir, --control-dir, and at least "
                       "one --shifted-dir\n");
          return 2;
        }
        return cmd_automorphy_dirs(base_dir, shifted_dirs, control_dir, proj_dim,
                                   t_samples, threshold, dest);
      }
      if (scenario_spec.empty()) {
        std::fprintf(stderr, "automorphy needs a scenario or ensemble directories\n");
        return 2;
      }
      if (amo->count("--delta")) dp = &delta;
      if (amo->count("--base")) bp = &base;
      Scenario sc = resolve_scenario(scenario_spec, dp, bp);
      StudyConfig cfg;
      cfg.n_paths = n_paths;
      cfg.t_start = t0;
      cfg.window = window;
      cfg.dt = dt;
      cfg.burn_in = burn_in;
      cfg.horizon = horizon;
      cfg.shift_count = shift_count;
      cfg.t_samples = t_samples;
      cfg.proj_dim = proj_dim;
      cfg.control_offset = control_offset;
      cfg.pass_threshold = threshold;
      cfg.seed = seed;
      cfg.mode = parse_mode(amode_str);
      cfg.tol = tol;
      cfg.max_iter = max_iter;
      cfg.workers = workers;
      return cmd_automorphy(sc, cfg, dest);
    }

    if (app.got_subcommand(rep)) return cmd_report(in_dir, out_dir);

    return 2;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "path %d failed to converge\n", e.path_index);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
