#include "levylab/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace levylab {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::map<std::string, int> module_version_table() {
  return {{"spectral", 1}, {"noise", 1},  {"scenario", 1}, {"hypothesis", 1},
          {"lp", 1},       {"solver", 1}, {"metrics", 1},  {"io", 1}};
}

}  // namespace

std::string fingerprint_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_path_csv(const std::string& file, const SolutionPath& path) {
  if (path.states.empty() || path.grid.size() != path.states.size()) {
    throw std::invalid_argument("malformed path");
  }
  std::FILE* f = std::fopen(file.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + file + " for writing");
  int modes = int(path.states[0].size());
  std::fputs("t", f);
  for (int n = 0; n < modes; ++n) std::fprintf(f, ",c%d", n + 1);
  std::fputc('\n', f);
  for (std::size_t j = 0; j < path.grid.size(); ++j) {
    std::fprintf(f, "%.17g", path.grid[j]);
    for (double v : path.states[j]) std::fprintf(f, ",%.17g", v);
    std::fputc('\n', f);
  }
  std::fclose(f);
}

SolutionPath read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,", 0) != 0) {
    throw std::runtime_error("unexpected csv header in " + file);
  }
  int cols = 1 + int(std::count(line.begin(), line.end(), ','));
  SolutionPath p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double t = std::strtod(s, &end);
    Vec st(cols - 1);
    for (int k = 0; k + 1 < cols; ++k) {
      if (*end != ',') throw std::runtime_error("short csv row in " + file);
      s = end + 1;
      st[k] = std::strtod(s, &end);
    }
    p.grid.push_back(t);
    p.states.push_back(std::move(st));
  }
  if (p.grid.size() < 2) throw std::runtime_error("csv has too few rows: " + file);
  return p;
}

RunManifest RunManifest::base(const std::string& kind, const Scenario& sc) {
  RunManifest m;
  m.kind = kind;
  m.tool_version = kToolVersion;
  m.module_versions = module_version_table();
  m.scenario_canonical = canonical_json(sc);
  m.scenario_fingerprint = fingerprint_hex(scenario_hash(sc));
  return m;
}

void write_manifest(const std::string& file, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["kind"] = m.kind;
  j["tool_version"] = m.tool_version;
  j["module_versions"] = m.module_versions;
  j["scenario_fingerprint"] = m.scenario_fingerprint;
  j["scenario_canonical"] = m.scenario_canonical;
  j["seed"] = m.seed;
  j["salt"] = m.salt;
  j["grid"] = {{"t_start", m.grid.t_start},
               {"t_end", m.grid.t_end},
               {"dt", m.grid.dt},
               {"burn_in", m.grid.burn_in}};
  j["n_paths"] = m.n_paths;
  j["mode"] = m.mode;
  j["tol"] = m.tol;
  j["max_iter"] = m.max_iter;
  j["workers"] = m.workers;
  if (m.kind == "automorphy") {
    j["horizon"] = m.horizon;
    j["shift_count"] = m.shift_count;
    j["t_samples"] = m.t_samples;
    j["proj_dim"] = m.proj_dim;
    j["control_offset"] = m.control_offset;
    j["pass_threshold"] = m.pass_threshold;
  }
  if (m.convergence_checked) {
    j["self_convergence"] = {
        {"ratio", m.convergence_ratio},
        {"first_order", m.convergence_ratio > 0.35 && m.convergence_ratio < 0.7}};
  }
  j["outputs"] = m.outputs;
  j["timings_ms"] = m.timings_ms;
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open " + file + " for writing");
  out << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  nlohmann::json j = nlohmann::json::parse(in);
  RunManifest m;
  m.kind = j.at("kind").get<std::string>();
  m.tool_version = j.value("tool_version", std::string());
  if (j.contains("module_versions")) {
    m.module_versions = j.at("module_versions").get<std::map<std::string, int>>();
  }
  m.scenario_canonical = j.at("scenario_canonical").get<std::string>();
  m.scenario_fingerprint = j.at("scenario_fingerprint").get<std::string>();
  m.seed = j.value("seed", std::uint64_t(0));
  m.salt = j.value("salt", std::uint64_t(0));
  const auto& g = j.at("grid");
  m.grid.t_start = g.at("t_start").get<double>();
  m.grid.t_end = g.at("t_end").get<double>();
  m.grid.dt = g.at("dt").get<double>();
  m.grid.burn_in = g.at("burn_in").get<double>();
  m.n_paths = j.value("n_paths", 0);
  m.mode = j.value("mode", std::string("picard"));
  m.tol = j.value("tol", 1e-6);
  m.max_iter = j.value("max_iter", 50);
  m.workers = j.value("workers", 1);
  m.horizon = j.value("horizon", 0.0);
  m.shift_count = j.value("shift_count", 0);
  m.t_samples = j.value("t_samples", 0);
  m.proj_dim = j.value("proj_dim", 0);
  m.control_offset = j.value("control_offset", 0.0);
  m.pass_threshold = j.value("pass_threshold", 0.0);
  if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::vector<std::string>>();
  if (j.contains("timings_ms")) {
    m.timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
  }
  if (j.contains("self_convergence")) {
    m.convergence_checked = true;
    m.convergence_ratio = j.at("self_convergence").at("ratio").get<double>();
  }
  return m;
}

std::string hypothesis_report_text(const Scenario& sc, const HypothesisReport& rep) {
  std::ostringstream os;
  os << std::setprecision(12);
  auto flag = [](bool ok) { return ok ? "ok" : "FAIL"; };
  os << "scenario " << sc.name << " fingerprint " << fingerprint_hex(scenario_hash(sc))
     << "\n";
  os << "semigroup " << flag(rep.semigroup_ok) << " K=" << rep.stability_K
     << " omega=" << rep.stability_omega << " max_excess=" << rep.semigroup_max_excess
     << "\n";
  os << "kernels " << flag(rep.kernels_ok) << " b1_l1=" << rep.norms.b1_l1
     << " b2_l1=" << rep.norms.b2_l1 << " b2_l2sq=" << rep.norms.b2_l2sq
     << " theta=" << rep.theta << "\n";
  os << "moduli " << flag(rep.moduli_ok) << " L_g=" << rep.L_g << " L_f=" << rep.L_f
     << " L_h=" << rep.L_h << " L_F=" << rep.L_F << " L_G=" << rep.L_G
     << " lipschitz_excess=" << rep.lipschitz_excess << "\n";
  os << "contraction " << flag(rep.contraction_ok) << " vartheta=" << rep.vartheta
     << " delta=" << sc.coeffs.delta << " critical_delta=" << rep.critical_delta << "\n";
  os << "radius " << flag(rep.radius_ok) << " r_min=" << rep.r_min << "\n";
  os << "verdict " << (rep.all_ok() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

void write_automorphy_csv(const std::string& file, const std::vector<ReportRow>& rows) {
  std::FILE* f = std::fopen(file.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + file + " for writing");
  std::fputs("t,tau,epsilon,beta\n", f);
  for (const auto& r : rows) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", r.t, r.tau, r.epsilon, r.beta);
  }
  std::fclose(f);
}

std::vector<ReportRow> read_automorphy_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file);
  std::string line;
  if (!std::getline(in, line) || line != "t,tau,epsilon,beta") {
    throw std::runtime_error("unexpected csv header in " + file);
  }
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ReportRow r;
    const char* s = line.c_str();
    char* end = nullptr;
    r.t = std::strtod(s, &end);
    double* slots[3] = {&r.tau, &r.epsilon, &r.beta};
    for (double* slot : slots) {
      if (*end != ',') throw std::runtime_error("short csv row in " + file);
      s = end + 1;
      *slot = std::strtod(s, &end);
    }
    rows.push_back(r);
  }
  return rows;
}

std::string automorphy_summary_text(const Scenario& sc, const AutomorphyReport& rep,
                                    double control_epsilon) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "distribution recurrence study\n";
  os << "scenario " << sc.name << " fingerprint " << fingerprint_hex(scenario_hash(sc))
     << "\n";
  os << "projection_dim " << rep.proj_dim << "\n";
  std::vector<double> taus;
  for (const auto& c : rep.cells) {
    if (std::find(taus.begin(), taus.end(), c.tau) == taus.end()) taus.push_back(c.tau);
  }
  double ctrl_sum = 0;
  for (double tau : taus) {
    double sum = 0, eps = 0;
    int cnt = 0;
    for (const auto& c : rep.cells) {
      if (c.tau == tau) {
        sum += c.beta;
        eps = c.epsilon;
        ++cnt;
      }
    }
    os << "shift tau=" << tau << " eps=" << eps << " mean_beta=" << sum / cnt << "\n";
  }
  for (const auto& c : rep.cells) ctrl_sum += c.beta_control;
  os << "control tau=" << rep.control_tau << " eps=" << control_epsilon
     << " mean_beta=" << ctrl_sum / rep.cells.size() << "\n";
  os << "pass_fraction " << rep.pass_fraction << " threshold " << rep.pass_threshold
     << "\n";
  os << "rank_correlation " << rep.correlation << "\n";
  os << "verdict " << (rep.passed ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string automorphy_svg(const std::vector<ReportRow>& rows) {
  const int W = 640, H = 420, ML = 70, MR = 24, MT = 44, MB = 56;
  double xmax = 1e-6, ymax = 1e-6;
  for (const auto& r : rows) {
    xmax = std::max(xmax, r.epsilon);
    ymax = std::max(ymax, r.beta);
  }
  xmax *= 1.08;
  ymax *= 1.15;
  auto X = [&](double e) { return ML + e / xmax * (W - ML - MR); };
  auto Y = [&](double b) { return H - MB - b / ymax * (H - MT - MB); };
  char buf[256];
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2
    << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
       "law distance vs recurrence error</text>\n";
  // axes
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML,
                H - MB, W - MR, H - MB);
  s << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML,
                MT, ML, H - MB);
  s << buf;
  for (int k = 0; k <= 4; ++k) {
    double xv = xmax * k / 4, yv = ymax * k / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%d\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  X(xv), H - MB + 18, xv);
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%.1f\" text-anchor=\"end\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%.3g</text>\n",
                  ML - 6, Y(yv) + 4, yv);
    s << buf;
  }
  s << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 14
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       "recurrence error</text>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"20\" y=\"%d\" text-anchor=\"middle\" "
                "font-family=\"sans-serif\" font-size=\"13\" "
                "transform=\"rotate(-90 20 %d)\">beta</text>\n",
                (MT + H - MB) / 2, (MT + H - MB) / 2);
  s << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"steelblue\" "
                  "fill-opacity=\"0.7\"/>\n",
                  X(r.epsilon), Y(r.beta));
    s << buf;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace levylab
