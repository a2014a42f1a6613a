#include "levylab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace levylab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

const char* mode_name(SolveMode m) {
  return m == SolveMode::picard ? "picard" : "forward";
}

SolveMode mode_from_name(const std::string& s) {
  if (s == "picard") return SolveMode::picard;
  if (s == "forward") return SolveMode::forward;
  throw std::invalid_argument("unknown solve mode: " + s);
}

std::string path_file_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "path_%04d.csv", i);
  return buf;
}

/// evenly spaced sample times across the window, snapped onto the step grid
std::vector<double> sample_times(double t_start, double window, double dt, int count) {
  std::vector<double> ts(count);
  for (int i = 0; i < count; ++i) {
    double raw = t_start + window * double(i) / (count - 1);
    long m = std::lround((raw - t_start) / dt);
    ts[i] = t_start + double(m) * dt;
  }
  return ts;
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file + " for writing");
  out << text;
}

int write_study_artifacts(const Scenario& sc, const StudyResult& res, RunManifest m,
                          const std::string& out_dir,
                          std::map<std::string, double> timings) {
  fs::create_directories(out_dir);
  auto rows = study_rows(res);
  write_automorphy_csv(out_dir + "/automorphy.csv", rows);
  std::string summary = automorphy_summary_text(sc, res.report, res.control_epsilon);
  write_text(out_dir + "/summary.txt", summary);
  write_text(out_dir + "/chart.svg", automorphy_svg(rows));
  m.outputs = {"automorphy.csv", "summary.txt", "chart.svg"};
  m.timings_ms = std::move(timings);
  write_manifest(out_dir + "/manifest.json", m);
  std::fputs(summary.c_str(), stdout);
  return res.report.passed ? 0 : 1;
}

}  // namespace

std::vector<double> active_tones(const Scenario& sc) {
  const auto& f = sc.coeffs.frequencies;
  return {f[0], f[1], f[2], f[3]};
}

EnsembleResult ensemble_run_parallel(const Scenario& sc, const GridSpec& grid, int n_paths,
                                     std::uint64_t seed, SolveMode mode, double tol,
                                     int max_iter, std::uint64_t salt, int workers) {
  if (workers <= 1 || n_paths == 1) {
    return ensemble_run(sc, grid, n_paths, seed, mode, tol, max_iter, salt);
  }
  if (n_paths < 1) throw std::invalid_argument("need at least one path");
  grid.validate();
  sc.validate();
  std::vector<SolutionPath> paths(n_paths);
  std::vector<IterationTrace> traces(mode == SolveMode::picard ? n_paths : 0);
  std::atomic<int> cursor{0};
  std::mutex mtx;
  int fail_index = -1;
  IterationTrace fail_trace;
  std::string fail_what;
  std::exception_ptr hard_error;
  auto work = [&]() {
    for (int i = cursor.fetch_add(1); i < n_paths; i = cursor.fetch_add(1)) {
      SegmentRequest req;
      req.t0 = grid.grid_start();
      req.dt = grid.dt;
      req.steps = grid.total_steps();
      req.seed = seed;
      req.path = std::uint64_t(i);
      req.salt = salt;
      try {
        LevyPathSegment seg = sample_segment(sc.wiener, sc.jumps, req);
        NoiseRef ref{seed, std::uint64_t(i), salt};
        if (mode == SolveMode::picard) {
          PicardResult pr = picard_solve(sc, grid, seg, tol, max_iter);
          pr.path.noise_ref = ref;
          paths[i] = std::move(pr.path);
          traces[i] = std::move(pr.trace);
        } else {
          SolutionPath p = simulate_forward(sc, Vec(sc.space.modes, 0.0), grid, seg);
          p.noise_ref = ref;
          paths[i] = std::move(p);
        }
      } catch (const ConvergenceError& e) {
        std::lock_guard<std::mutex> lk(mtx);
        if (fail_index < 0 || i < fail_index) {
          fail_index = i;
          fail_trace = e.trace;
          fail_what = e.what();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lk(mtx);
        if (!hard_error) hard_error = std::current_exception();
      }
    }
  };
  int nw = std::min(workers, n_paths);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (hard_error) std::rethrow_exception(hard_error);
  if (fail_index >= 0) throw ConvergenceError(fail_what, fail_trace, fail_index);
  EnsembleResult res;
  res.paths = std::move(paths);
  res.traces = std::move(traces);
  return res;
}

StudyResult run_automorphy_study(const Scenario& sc, const StudyConfig& cfg) {
  sc.validate();
  if (cfg.n_paths < 1) throw std::invalid_argument("need at least one path");
  if (cfg.t_samples < 2) throw std::invalid_argument("need at least two sample times");
  if (cfg.proj_dim < 1 || cfg.proj_dim > sc.space.modes) {
    throw std::invalid_argument("projection dimension out of range");
  }
  if (cfg.shift_count < 1) throw std::invalid_argument("need at least one shift");
  GridSpec base_grid{cfg.t_start, cfg.t_start + cfg.window, cfg.dt, cfg.burn_in};
  base_grid.validate();

  ShiftSequence shifts =
      find_recurrence_shifts(active_tones(sc), cfg.horizon, cfg.shift_count, cfg.dt, 1.0);
  if (shifts.shifts.empty()) {
    throw std::invalid_argument("no recurrence shifts within the horizon");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < shifts.recurrence_errors.size(); ++i) {
    if (shifts.recurrence_errors[i] < shifts.recurrence_errors[best]) best = i;
  }
  double control_tau =
      shifts.shifts[best] + double(std::lround(cfg.control_offset / cfg.dt)) * cfg.dt;
  auto t_grid = sample_times(cfg.t_start, cfg.window, cfg.dt, cfg.t_samples);

  auto run_window = [&](double offset) {
    GridSpec g{cfg.t_start + offset, cfg.t_start + offset + cfg.window, cfg.dt,
               cfg.burn_in};
    return ensemble_run_parallel(sc, g, cfg.n_paths, cfg.seed, cfg.mode, cfg.tol,
                                 cfg.max_iter, 0, cfg.workers);
  };
  auto base = run_window(0.0);
  std::vector<std::vector<SolutionPath>> shifted;
  shifted.reserve(shifts.shifts.size());
  for (double tau : shifts.shifts) shifted.push_back(run_window(tau).paths);
  auto control = run_window(control_tau);

  double ceps = 0;
  for (double w : active_tones(sc)) ceps = std::max(ceps, circle_gap(w * control_tau));
  AutomorphyReport rep =
      automorphy_profile(base.paths, shifted, control.paths, control_tau, ceps, shifts,
                         t_grid, cfg.proj_dim, cfg.pass_threshold);
  return {std::move(rep), std::move(shifts), control_tau, ceps, std::move(t_grid)};
}

std::vector<ReportRow> study_rows(const StudyResult& res) {
  std::vector<ReportRow> rows;
  rows.reserve(res.report.cells.size() + res.t_grid.size());
  for (const auto& c : res.report.cells) rows.push_back({c.t, c.tau, c.epsilon, c.beta});
  std::vector<double> seen;
  for (const auto& c : res.report.cells) {
    if (std::find(seen.begin(), seen.end(), c.t) == seen.end()) {
      seen.push_back(c.t);
      rows.push_back({c.t, res.control_tau, res.control_epsilon, c.beta_control});
    }
  }
  return rows;
}

int cmd_check(const Scenario& sc, const std::string& out_dir) {
  auto t0 = Clock::now();
  HypothesisReport rep = check_hypotheses(sc);
  std::string text = hypothesis_report_text(sc, rep);
  std::fputs(text.c_str(), stdout);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(out_dir + "/hypothesis_report.txt", text);
    RunManifest m = RunManifest::base("check", sc);
    m.outputs = {"hypothesis_report.txt"};
    m.timings_ms["check"] = ms_since(t0);
    write_manifest(out_dir + "/manifest.json", m);
  }
  return rep.all_ok() ? 0 : 1;
}

int cmd_simulate(const Scenario& sc, const GridSpec& grid, int n_paths, std::uint64_t seed,
                 std::uint64_t salt, SolveMode mode, double tol, int max_iter, int workers,
                 bool check_convergence, const std::string& out_dir) {
  auto t0 = Clock::now();
  EnsembleResult ens;
  try {
    ens = ensemble_run_parallel(sc, grid, n_paths, seed, mode, tol, max_iter, salt,
                                workers);
  } catch (const ConvergenceError& e) {
    double last = e.trace.distances.empty() ? 0.0 : e.trace.distances.back();
    std::fprintf(stderr, "path %d failed to converge after %d sweeps (last distance %g)\n",
                 e.path_index, e.trace.iterations, last);
    return 1;
  }
  double sim_ms = ms_since(t0);

  fs::create_directories(out_dir);
  RunManifest m = RunManifest::base("simulate", sc);
  m.seed = seed;
  m.salt = salt;
  m.grid = grid;
  m.n_paths = n_paths;
  m.mode = mode_name(mode);
  m.tol = tol;
  m.max_iter = max_iter;
  m.workers = workers;
  for (int i = 0; i < n_paths; ++i) {
    std::string name = path_file_name(i);
    write_path_csv(out_dir + "/" + name, ens.paths[i]);
    m.outputs.push_back(name);
  }
  m.timings_ms["simulate"] = sim_ms;

  if (check_convergence) {
    auto tc = Clock::now();
    GridSpec g1 = grid;
    g1.burn_in = grid.burn_steps() * grid.dt;  // freeze the rounded burn-in
    GridSpec g2 = g1, g4 = g1;
    g2.dt = grid.dt / 2;
    g4.dt = grid.dt / 4;
    SegmentRequest req;
    req.t0 = g4.grid_start();
    req.dt = g4.dt;
    req.steps = g4.total_steps();
    req.seed = seed;
    req.salt = salt;
    LevyPathSegment seg4 = sample_segment(sc.wiener, sc.jumps, req);
    LevyPathSegment seg2 = coarsen(seg4, 2);
    LevyPathSegment seg1 = coarsen(seg2, 2);
    Vec rest(sc.space.modes, 0.0);
    auto x1 = simulate_forward(sc, rest, g1, seg1);
    auto x2 = simulate_forward(sc, rest, g2, seg2);
    auto x4 = simulate_forward(sc, rest, g4, seg4);
    double d_coarse = vector_dist(x1.states.back(), x2.states.back());
    double d_fine = vector_dist(x2.states.back(), x4.states.back());
    m.convergence_checked = true;
    m.convergence_ratio = d_coarse > 0 ? d_fine / d_coarse : 0.0;
    m.timings_ms["self_convergence"] = ms_since(tc);
  }
  write_manifest(out_dir + "/manifest.json", m);
  std::printf("wrote %d path file(s) to %s\n", n_paths, out_dir.c_str());
  return 0;
}

int cmd_simulate_from_manifest(const std::string& manifest_file,
                               const std::string& out_dir) {
  RunManifest m = read_manifest(manifest_file);
  if (m.kind != "simulate") {
    std::fprintf(stderr, "manifest kind '%s' cannot seed a simulate run\n",
                 m.kind.c_str());
    return 2;
  }
  Scenario sc = load_scenario_json(m.scenario_canonical);
  if (fingerprint_hex(scenario_hash(sc)) != m.scenario_fingerprint) {
    std::fprintf(stderr, "manifest fingerprint does not match its embedded scenario\n");
    return 2;
  }
  return cmd_simulate(sc, m.grid, m.n_paths, m.seed, m.salt, mode_from_name(m.mode),
                      m.tol, m.max_iter, m.workers, m.convergence_checked, out_dir);
}

int cmd_automorphy(const Scenario& sc, const StudyConfig& cfg,
                   const std::string& out_dir) {
  auto t0 = Clock::now();
  StudyResult res;
  try {
    res = run_automorphy_study(sc, cfg);
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "path %d failed to converge during the study\n", e.path_index);
    return 1;
  }
  RunManifest m = RunManifest::base("automorphy", sc);
  m.seed = cfg.seed;
  m.grid = GridSpec{cfg.t_start, cfg.t_start + cfg.window, cfg.dt, cfg.burn_in};
  m.n_paths = cfg.n_paths;
  m.mode = mode_name(cfg.mode);
  m.tol = cfg.tol;
  m.max_iter = cfg.max_iter;
  m.workers = cfg.workers;
  m.horizon = cfg.horizon;
  m.shift_count = cfg.shift_count;
  m.t_samples = cfg.t_samples;
  m.proj_dim = cfg.proj_dim;
  m.control_offset = cfg.control_offset;
  m.pass_threshold = cfg.pass_threshold;
  std::map<std::string, double> timings{{"study", ms_since(t0)}};
  return write_study_artifacts(sc, res, std::move(m), out_dir, std::move(timings));
}

int cmd_automorphy_dirs(const std::string& base_dir,
                        const std::vector<std::string>& shifted_dirs,
                        const std::string& control_dir, int proj_dim, int t_samples,
                        double pass_threshold, const std::string& out_dir) {
  auto t0 = Clock::now();
  RunManifest mb = read_manifest(base_dir + "/manifest.json");
  std::vector<RunManifest> ms;
  for (const auto& d : shifted_dirs) ms.push_back(read_manifest(d + "/manifest.json"));
  RunManifest mc = read_manifest(control_dir + "/manifest.json");

  auto incompatible = [](const char* what) {
    std::fprintf(stderr, "incompatible ensembles: %s\n", what);
    return 2;
  };
  std::vector<const RunManifest*> others;
  for (const auto& m : ms) others.push_back(&m);
  others.push_back(&mc);
  for (const RunManifest* o : others) {
    if (o->scenario_fingerprint != mb.scenario_fingerprint) {
      return incompatible("scenario fingerprints differ");
    }
    if (o->seed != mb.seed || o->salt != mb.salt) {
      return incompatible("seed policies differ");
    }
    if (o->n_paths != mb.n_paths) return incompatible("path counts differ");
    if (std::fabs(o->grid.dt - mb.grid.dt) > 1e-12 ||
        std::fabs((o->grid.t_end - o->grid.t_start) -
                  (mb.grid.t_end - mb.grid.t_start)) > 1e-9 ||
        std::fabs(o->grid.burn_in - mb.grid.burn_in) > 1e-9) {
      return incompatible("grids differ");
    }
  }

  Scenario sc = load_scenario_json(mb.scenario_canonical);
  auto tones = active_tones(sc);
  auto gap_of = [&](double tau) {
    double e = 0;
    for (double w : tones) e = std::max(e, circle_gap(w * tau));
    return e;
  };
  ShiftSequence shifts;
  for (const auto& m : ms) {
    double tau = m.grid.t_start - mb.grid.t_start;
    if (!(tau > 0)) return incompatible("shifted window does not follow the base window");
    shifts.shifts.push_back(tau);
    shifts.recurrence_errors.push_back(gap_of(tau));
  }
  double control_tau = mc.grid.t_start - mb.grid.t_start;
  if (!(control_tau > 0)) {
    return incompatible("control window does not follow the base window");
  }

  auto read_ensemble = [&](const std::string& dir) {
    std::vector<SolutionPath> out;
    out.reserve(mb.n_paths);
    for (int i = 0; i < mb.n_paths; ++i) {
      out.push_back(read_path_csv(dir + "/" + path_file_name(i)));
    }
    return out;
  };
  auto base = read_ensemble(base_dir);
  std::vector<std::vector<SolutionPath>> shifted;
  for (const auto& d : shifted_dirs) shifted.push_back(read_ensemble(d));
  auto control = read_ensemble(control_dir);

  auto t_grid = sample_times(mb.grid.t_start, mb.grid.t_end - mb.grid.t_start,
                             mb.grid.dt, t_samples);
  double control_eps = gap_of(control_tau);
  AutomorphyReport rep =
      automorphy_profile(base, shifted, control, control_tau, control_eps, shifts, t_grid,
                         proj_dim, pass_threshold);
  StudyResult res{std::move(rep), std::move(shifts), control_tau, control_eps,
                  std::move(t_grid)};

  RunManifest m = RunManifest::base("automorphy", sc);
  m.seed = mb.seed;
  m.salt = mb.salt;
  m.grid = mb.grid;
  m.n_paths = mb.n_paths;
  m.mode = mb.mode;
  m.tol = mb.tol;
  m.max_iter = mb.max_iter;
  m.t_samples = t_samples;
  m.proj_dim = proj_dim;
  m.pass_threshold = pass_threshold;
  m.shift_count = int(shifted_dirs.size());
  std::map<std::string, double> timings{{"study", ms_since(t0)}};
  return write_study_artifacts(sc, res, std::move(m), out_dir, std::move(timings));
}

int cmd_report(const std::string& in_dir, const std::string& out_dir) {
  auto rows = read_automorphy_csv(in_dir + "/automorphy.csv");
  std::string dest = out_dir.empty() ? in_dir : out_dir;
  fs::create_directories(dest);
  write_text(dest + "/chart.svg", automorphy_svg(rows));
  std::ifstream sum(in_dir + "/summary.txt");
  if (sum) std::cout << sum.rdbuf();
  return 0;
}

}  // namespace levylab
