#include "levylab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace levylab {

namespace {
constexpr double kPiSq = 9.869604401089358;
}

Semigroup Scenario::semigroup() const {
  if (space.basis == Basis::dirichlet_sine) return Semigroup::dirichlet(space.modes);
  if (int(decay_rates.size()) != space.modes) {
    throw std::invalid_argument("decay rate list must match the mode count");
  }
  return Semigroup::diagonal(decay_rates, stability_K, stability_omega);
}

void Scenario::validate() const {
  if (space.modes < 1) throw std::invalid_argument("mode count must be positive");
  if (space.basis == Basis::dirichlet_sine && !decay_rates.empty()) {
    throw std::invalid_argument("dirichlet basis derives its own decay rates");
  }
  semigroup();
  wiener.validate();
  if (int(wiener.q.size()) != space.modes) {
    throw std::invalid_argument("wiener covariance length must match the mode count");
  }
  jumps.validate();
  if (jumps.direction == JumpDirection::fixed_mode && jumps.direction_mode > space.modes) {
    throw std::invalid_argument("fixed jump mode exceeds the mode count");
  }
  if (!(b1_rate > 0.0) || !std::isfinite(b1_rate) || !(b2_rate > 0.0) || !std::isfinite(b2_rate)) {
    throw std::invalid_argument("memory kernel rates must be positive and finite");
  }
  if (!(coeffs.delta >= 0.0) || !std::isfinite(coeffs.delta)) {
    throw std::invalid_argument("coefficient scale must be nonnegative and finite");
  }
  if (!(coeffs.base_amplitude >= 0.0) || !std::isfinite(coeffs.base_amplitude)) {
    throw std::invalid_argument("base amplitude must be nonnegative and finite");
  }
  for (double w : coeffs.frequencies) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("tone frequencies must be positive and finite");
    }
  }
}

Scenario builtin_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  auto fill_q = [&sc]() {
    sc.wiener.q.resize(sc.space.modes);
    for (int n = 0; n < sc.space.modes; ++n) {
      sc.wiener.q[n] = 0.25 / ((n + 1.0) * (n + 1.0));
    }
  };
  if (name == "quasi_periodic_sine") {
    sc.space.modes = 64;
    sc.space.basis = Basis::dirichlet_sine;
    sc.b1_rate = kPiSq;
    sc.b2_rate = kPiSq;
    fill_q();
    sc.coeffs.family = CoefficientFamily::quasi_periodic_sine;
    sc.coeffs.delta = 0.05;
  } else if (name == "linear_test") {
    sc.space.modes = 8;
    sc.space.basis = Basis::dirichlet_sine;
    sc.b1_rate = kPiSq;
    sc.b2_rate = kPiSq;
    fill_q();
    sc.coeffs.family = CoefficientFamily::linear_test;
    sc.coeffs.delta = 0.1;
  } else {
    throw std::invalid_argument("unknown builtin scenario: " + name);
  }
  sc.validate();
  return sc;
}

namespace {

using nlohmann::ordered_json;

void check_keys(const ordered_json& o, const std::string& where,
                std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional) {
  if (!o.is_object()) throw std::invalid_argument(where + " must be an object");
  for (const char* k : required) {
    if (!o.contains(k)) throw std::invalid_argument(where + " is missing \"" + k + "\"");
  }
  std::set<std::string> allowed;
  for (const char* k : required) allowed.insert(k);
  for (const char* k : optional) allowed.insert(k);
  for (const auto& item : o.items()) {
    if (!allowed.count(item.key())) {
      throw std::invalid_argument(where + " has unknown key \"" + item.key() + "\"");
    }
  }
}

double num(const ordered_json& o, const std::string& where, const char* key) {
  const auto& v = o.at(key);
  if (!v.is_number()) throw std::invalid_argument(where + "." + key + " must be a number");
  return v.get<double>();
}

std::vector<double> num_list(const ordered_json& o, const std::string& where, const char* key) {
  const auto& v = o.at(key);
  if (!v.is_array()) throw std::invalid_argument(where + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw std::invalid_argument(where + "." + key + " must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::string str(const ordered_json& o, const std::string& where, const char* key) {
  const auto& v = o.at(key);
  if (!v.is_string()) throw std::invalid_argument(where + "." + key + " must be a string");
  return v.get<std::string>();
}

Scenario from_json(const ordered_json& doc) {
  check_keys(doc, "scenario", {"name", "space", "kernels", "wiener", "jumps", "coefficients"}, {});
  Scenario sc;
  sc.name = str(doc, "scenario", "name");

  const auto& sp = doc.at("space");
  std::string basis = str(sp, "space", "basis");
  if (basis == "dirichlet_sine") {
    check_keys(sp, "space", {"basis", "modes"}, {});
    sc.space.basis = Basis::dirichlet_sine;
  } else if (basis == "abstract_diagonal") {
    check_keys(sp, "space", {"basis", "modes", "decay_rates", "stability_K", "stability_omega"}, {});
    sc.space.basis = Basis::abstract_diagonal;
    sc.decay_rates = num_list(sp, "space", "decay_rates");
    sc.stability_K = num(sp, "space", "stability_K");
    sc.stability_omega = num(sp, "space", "stability_omega");
  } else {
    throw std::invalid_argument("space.basis must be dirichlet_sine or abstract_diagonal");
  }
  if (!sp.at("modes").is_number_integer()) {
    throw std::invalid_argument("space.modes must be an integer");
  }
  sc.space.modes = sp.at("modes").get<int>();

  const auto& ke = doc.at("kernels");
  check_keys(ke, "kernels", {"b1_rate", "b2_rate"}, {});
  sc.b1_rate = num(ke, "kernels", "b1_rate");
  sc.b2_rate = num(ke, "kernels", "b2_rate");

  const auto& wi = doc.at("wiener");
  if (!wi.is_object()) throw std::invalid_argument("wiener must be an object");
  bool has_q = wi.contains("q");
  bool has_scale = wi.contains("q_scale");
  if (has_q == has_scale) {
    throw std::invalid_argument("wiener needs exactly one of \"q\" or \"q_scale\"");
  }
  if (has_q) {
    check_keys(wi, "wiener", {"q"}, {});
    sc.wiener.q = num_list(wi, "wiener", "q");
  } else {
    check_keys(wi, "wiener", {"q_scale"}, {});
    double s = num(wi, "wiener", "q_scale");
    sc.wiener.q.resize(sc.space.modes);
    for (int n = 0; n < sc.space.modes; ++n) sc.wiener.q[n] = s / ((n + 1.0) * (n + 1.0));
  }

  const auto& ju = doc.at("jumps");
  std::string family = str(ju, "jumps", "family");
  std::string dir;
  if (family == "truncated_power_law") {
    check_keys(ju, "jumps",
               {"family", "small_cutoff", "alpha", "c_plus", "c_minus", "y_max", "direction"},
               {"direction_mode"});
    sc.jumps.family = JumpFamily::truncated_power_law;
    sc.jumps.alpha = num(ju, "jumps", "alpha");
    sc.jumps.c_plus = num(ju, "jumps", "c_plus");
    sc.jumps.c_minus = num(ju, "jumps", "c_minus");
    sc.jumps.y_max = num(ju, "jumps", "y_max");
  } else if (family == "finite_atoms") {
    check_keys(ju, "jumps", {"family", "small_cutoff", "sizes", "rates", "direction"},
               {"direction_mode"});
    sc.jumps.family = JumpFamily::finite_atoms;
    sc.jumps.atom_sizes = num_list(ju, "jumps", "sizes");
    sc.jumps.atom_rates = num_list(ju, "jumps", "rates");
  } else {
    throw std::invalid_argument("jumps.family must be truncated_power_law or finite_atoms");
  }
  sc.jumps.small_cutoff = num(ju, "jumps", "small_cutoff");
  dir = str(ju, "jumps", "direction");
  if (dir == "fixed_mode") {
    sc.jumps.direction = JumpDirection::fixed_mode;
    if (!ju.contains("direction_mode")) {
      throw std::invalid_argument("jumps.direction_mode is required for fixed_mode");
    }
    sc.jumps.direction_mode = int(num(ju, "jumps", "direction_mode"));
  } else if (dir == "random_mode") {
    sc.jumps.direction = JumpDirection::random_mode;
    if (ju.contains("direction_mode")) {
      throw std::invalid_argument("jumps.direction_mode only applies to fixed_mode");
    }
  } else {
    throw std::invalid_argument("jumps.direction must be fixed_mode or random_mode");
  }

  const auto& co = doc.at("coefficients");
  check_keys(co, "coefficients", {"family", "delta"}, {"base_amplitude", "frequencies"});
  std::string cf = str(co, "coefficients", "family");
  if (cf == "quasi_periodic_sine") {
    sc.coeffs.family = CoefficientFamily::quasi_periodic_sine;
  } else if (cf == "zero") {
    sc.coeffs.family = CoefficientFamily::zero;
  } else if (cf == "linear_test") {
    sc.coeffs.family = CoefficientFamily::linear_test;
  } else {
    throw std::invalid_argument("coefficients.family is not recognized");
  }
  sc.coeffs.delta = num(co, "coefficients", "delta");
  if (co.contains("base_amplitude")) {
    sc.coeffs.base_amplitude = num(co, "coefficients", "base_amplitude");
  }
  if (co.contains("frequencies")) {
    auto fr = num_list(co, "coefficients", "frequencies");
    if (fr.size() != sc.coeffs.frequencies.size()) {
      throw std::invalid_argument("coefficients.frequencies must list five tones");
    }
    std::copy(fr.begin(), fr.end(), sc.coeffs.frequencies.begin());
  }

  sc.validate();
  return sc;
}

ordered_json to_json(const Scenario& sc) {
  ordered_json doc;
  doc["name"] = sc.name;
  ordered_json sp;
  sp["basis"] = sc.space.basis == Basis::dirichlet_sine ? "dirichlet_sine" : "abstract_diagonal";
  sp["modes"] = sc.space.modes;
  if (sc.space.basis == Basis::abstract_diagonal) {
    sp["decay_rates"] = sc.decay_rates;
    sp["stability_K"] = sc.stability_K;
    sp["stability_omega"] = sc.stability_omega;
  }
  doc["space"] = sp;
  doc["kernels"] = {{"b1_rate", sc.b1_rate}, {"b2_rate", sc.b2_rate}};
  doc["wiener"] = {{"q", sc.wiener.q}};
  ordered_json ju;
  if (sc.jumps.family == JumpFamily::truncated_power_law) {
    ju["family"] = "truncated_power_law";
    ju["small_cutoff"] = sc.jumps.small_cutoff;
    ju["alpha"] = sc.jumps.alpha;
    ju["c_plus"] = sc.jumps.c_plus;
    ju["c_minus"] = sc.jumps.c_minus;
    ju["y_max"] = sc.jumps.y_max;
  } else {
    ju["family"] = "finite_atoms";
    ju["small_cutoff"] = sc.jumps.small_cutoff;
    ju["sizes"] = sc.jumps.atom_sizes;
    ju["rates"] = sc.jumps.atom_rates;
  }
  if (sc.jumps.direction == JumpDirection::fixed_mode) {
    ju["direction"] = "fixed_mode";
    ju["direction_mode"] = sc.jumps.direction_mode;
  } else {
    ju["direction"] = "random_mode";
  }
  doc["jumps"] = ju;
  ordered_json co;
  switch (sc.coeffs.family) {
    case CoefficientFamily::quasi_periodic_sine: co["family"] = "quasi_periodic_sine"; break;
    case CoefficientFamily::zero: co["family"] = "zero"; break;
    case CoefficientFamily::linear_test: co["family"] = "linear_test"; break;
  }
  co["delta"] = sc.coeffs.delta;
  co["base_amplitude"] = sc.coeffs.base_amplitude;
  co["frequencies"] = sc.coeffs.frequencies;
  doc["coefficients"] = co;
  return doc;
}

}  // namespace

Scenario load_scenario_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario is not valid json: ") + e.what());
  }
  return from_json(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario_json(buf.str());
}

std::string canonical_json(const Scenario& sc) { return to_json(sc).dump(2) + "\n"; }

std::uint64_t scenario_hash(const Scenario& sc) {
  std::string text = canonical_json(sc);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

CoefficientEvaluator::CoefficientEvaluator(const Scenario& sc)
    : coeffs_(sc.coeffs), modes_(sc.space.modes) {
  if (coeffs_.family == CoefficientFamily::quasi_periodic_sine) {
    transform_ = std::make_shared<SineTransform>(modes_, 512);
    phys_.resize(transform_->quad_points());
  }
}

double CoefficientEvaluator::chi_g(double t) const {
  return std::sin(coeffs_.frequencies[0] * t) + std::sin(coeffs_.frequencies[1] * t);
}

double CoefficientEvaluator::chi_f(double t) const {
  return std::sin(coeffs_.frequencies[0] * t) + std::sin(coeffs_.frequencies[2] * t);
}

double CoefficientEvaluator::chi_noise(double t) const {
  return std::sin(coeffs_.frequencies[0] * t) + std::sin(coeffs_.frequencies[3] * t);
}

Vec CoefficientEvaluator::nemytskii(const Vec& x) const {
  transform_->synthesize(x, phys_);
  const double base = coeffs_.base_amplitude;
  for (auto& v : phys_) v = std::sin(v) + base;
  Vec out(modes_);
  transform_->project(phys_, out);
  return out;
}

CoefficientValues CoefficientEvaluator::values(double t, const Vec& x) const {
  if (int(x.size()) != modes_) throw std::invalid_argument("state length mismatch");
  CoefficientValues out;
  out.g.assign(modes_, 0.0);
  out.f.assign(modes_, 0.0);
  out.noise.assign(modes_, 0.0);
  switch (coeffs_.family) {
    case CoefficientFamily::zero:
      break;
    case CoefficientFamily::linear_test:
      out.g[0] = coeffs_.delta;
      break;
    case CoefficientFamily::quasi_periodic_sine: {
      Vec base = nemytskii(x);
      const double cg = coeffs_.delta * chi_g(t);
      const double cf = coeffs_.delta * chi_f(t);
      const double cn = coeffs_.delta * chi_noise(t);
      for (int n = 0; n < modes_; ++n) {
        out.g[n] = cg * base[n];
        out.f[n] = cf * base[n];
        out.noise[n] = cn * base[n];
      }
      break;
    }
  }
  return out;
}

double QuadraticModulus::operator()(double t) const {
  if (constant) return scale;
  double chi = std::sin(omega1 * t) + std::sin(omega2 * t);
  return scale * chi * chi;
}

double QuadraticModulus::sup() const { return constant ? scale : 4.0 * scale; }

double ModulusSet::envelope(double r) const {
  return envelope_slope * std::min(r, 1.0) + envelope_offset;
}

ModulusSet scenario_moduli(const Scenario& sc) {
  ModulusSet m;
  const auto& co = sc.coeffs;
  const double d2 = co.delta * co.delta;
  switch (co.family) {
    case CoefficientFamily::zero:
      break;
    case CoefficientFamily::linear_test:
      // constant forcing: no state dependence, envelope is the forcing norm
      m.envelope_offset = co.delta;
      break;
    case CoefficientFamily::quasi_periodic_sine: {
      const double w0 = co.frequencies[0];
      m.g = {d2, w0, co.frequencies[1], false};
      m.f = {d2, w0, co.frequencies[2], false};
      const double wn = co.frequencies[3];
      m.h = {d2 * sc.wiener.max_entry(), w0, wn, false};
      m.small_jump = {d2 * sc.jumps.second_moment_small(), w0, wn, false};
      m.large_jump = {d2 * sc.jumps.second_moment_large(), w0, wn, false};
      double c_env = std::max({1.0, std::sqrt(sc.wiener.max_entry()),
                               std::sqrt(sc.jumps.second_moment_small()),
                               std::sqrt(sc.jumps.second_moment_large()),
                               sc.jumps.abs_moment_large()});
      m.envelope_slope = 2.0 * co.delta * c_env;
      m.envelope_offset = m.envelope_slope * co.base_amplitude;
      break;
    }
  }
  return m;
}

}  // namespace levylab
