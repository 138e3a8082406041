#ifndef ROUGH_ATTRACTOR_CONFIG_HPP
#define ROUGH_ATTRACTOR_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "attractor.hpp"
#include "grid.hpp"
#include "spectral.hpp"
#include "stopping.hpp"

namespace rough_attractor {

class ConfigError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"noise-convergence", "stopping", "solve", "gronwall",
                                                 "pullback", "semicontinuity", "bounds-audit"};
  return names;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Accepts plain decimals and powers of two written as 2^-k.
inline double parse_real(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s.rfind("2^", 0) == 0) {
    int e = 0;
    const char* b = s.data() + 2;
    auto r = std::from_chars(b, s.data() + s.size(), e);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": bad power of two '" + s + "'");
    return std::ldexp(1.0, e);
  }
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": not a number '" + s + "'");
  return x;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  long long x = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(key + ": not an integer '" + s + "'");
  return x;
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& t : split(v, ',')) out.push_back(parse_real(key, t));
  return out;
}

// "1,2,5" or "1..20" or a mix of both.
inline std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  for (const auto& t : split(v, ',')) {
    const auto dots = t.find("..");
    if (dots == std::string::npos) {
      const auto x = parse_int(key, t);
      if (x < 0) throw ConfigError(key + ": seeds must be non-negative");
      out.push_back(static_cast<std::uint64_t>(x));
      continue;
    }
    const auto lo = parse_int(key, t.substr(0, dots));
    const auto hi = parse_int(key, t.substr(dots + 2));
    if (lo < 0 || hi < lo) throw ConfigError(key + ": bad seed range '" + t + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

inline std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>)
      out += format_real(v[i]);
    else
      out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace detail

/**
 * All parameters of one experiment. Every field has a key in the flat config file;
 * unknown keys are rejected so that typos cannot silently fall back to defaults.
 */
struct ExperimentConfig {
  std::string experiment = "noise-convergence";

  // noise
  double hurst = 0.4;
  double q = 0.015;
  std::size_t d = 1;
  int dt_exponent = 12;  // dt = 2^-dt_exponent
  double window = 24.0;  // driver sampled on [-window, window]
  std::string fbm_method = "automatic";

  // regularity and stopping
  double alpha = 0.35;
  double alpha_prime = 0.38;
  double mu = 0.1;
  double nu = 0.05;
  double stopping_tol = 1e-10;

  // equation
  double gamma = 0.1;
  double sigma = 0.05;
  double delta = 0.25;
  std::size_t n_modes = 64;
  std::string drift = "sine";
  double drift_scale = 0.08;
  double forcing = 0.08;
  std::string diffusion = "linear";
  std::vector<double> channel_scale = {0.08};
  double y0_amplitude = 1.0;
  std::size_t y0_mode = 1;
  std::string scheme = "explicit";
  double solver_tol = 1e-8;
  int max_iters = 64;
  double horizon = 1.0;

  // attractor
  double lemma_c = 2.1;
  std::optional<double> d1;
  double epsilon = 1e-10;
  int i_max = 30;
  std::size_t bundle_size = 8;
  double bundle_radius = 1.0;
  std::uint64_t bundle_seed = 7;

  // experiment shape
  std::vector<double> etas = {std::ldexp(1.0, -4), std::ldexp(1.0, -5), std::ldexp(1.0, -6),
                              std::ldexp(1.0, -7), std::ldexp(1.0, -8), std::ldexp(1.0, -9)};
  std::optional<std::vector<std::uint64_t>> seeds;
  int stopping_index = 10;
  int audit_intervals = 20;
  std::size_t calibration = 5;
  double audit_safety = 1.1;
  int gronwall_draws = 100;
  int gronwall_steps = 50;
  std::size_t threads = 0;  // 0 = one per hardware thread

  double dt() const { return std::ldexp(1.0, -dt_exponent); }

  /** Seeds used when the config leaves them unset. */
  std::vector<std::uint64_t> resolved_seeds() const {
    if (seeds) return *seeds;
    std::size_t n = 1;
    if (experiment == "noise-convergence") n = 20;
    if (experiment == "stopping" || experiment == "pullback" || experiment == "semicontinuity") n = 10;
    if (experiment == "bounds-audit") n = calibration + 10;
    std::vector<std::uint64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
    return out;
  }

  void set(const std::string& raw_key, const std::string& value) {
    using namespace detail;
    const std::string key = trim(raw_key);
    const std::string v = trim(value);
    auto real = [&] { return parse_real(key, v); };
    auto count = [&] {
      const auto x = parse_int(key, v);
      if (x < 0) throw ConfigError(key + ": must be non-negative");
      return static_cast<std::size_t>(x);
    };
    auto integer = [&] { return static_cast<int>(parse_int(key, v)); };
    if (key == "experiment") experiment = v;
    else if (key == "H") hurst = real();
    else if (key == "q") q = real();
    else if (key == "d") d = count();
    else if (key == "dt_exponent") dt_exponent = integer();
    else if (key == "window") window = real();
    else if (key == "fbm_method") fbm_method = v;
    else if (key == "alpha") alpha = real();
    else if (key == "alpha_prime") alpha_prime = real();
    else if (key == "mu") mu = real();
    else if (key == "nu") nu = real();
    else if (key == "stopping_tol") stopping_tol = real();
    else if (key == "gamma") gamma = real();
    else if (key == "sigma") sigma = real();
    else if (key == "delta") delta = real();
    else if (key == "n_modes") n_modes = count();
    else if (key == "drift") drift = v;
    else if (key == "drift_scale") drift_scale = real();
    else if (key == "forcing") forcing = real();
    else if (key == "diffusion") diffusion = v;
    else if (key == "channel_scale") channel_scale = parse_reals(key, v);
    else if (key == "y0_amplitude") y0_amplitude = real();
    else if (key == "y0_mode") y0_mode = count();
    else if (key == "scheme") scheme = v;
    else if (key == "solver_tol") solver_tol = real();
    else if (key == "max_iters") max_iters = integer();
    else if (key == "horizon") horizon = real();
    else if (key == "lemma_c") lemma_c = real();
    else if (key == "d1") d1 = v.empty() || v == "none" ? std::nullopt : std::optional<double>(real());
    else if (key == "epsilon") epsilon = real();
    else if (key == "i_max") i_max = integer();
    else if (key == "bundle_size") bundle_size = count();
    else if (key == "bundle_radius") bundle_radius = real();
    else if (key == "bundle_seed") bundle_seed = count();
    else if (key == "etas") etas = parse_reals(key, v);
    else if (key == "seeds") seeds = parse_seeds(key, v);
    else if (key == "stopping_index") stopping_index = integer();
    else if (key == "audit_intervals") audit_intervals = integer();
    else if (key == "calibration") calibration = count();
    else if (key == "audit_safety") audit_safety = real();
    else if (key == "gronwall_draws") gronwall_draws = integer();
    else if (key == "gronwall_steps") gronwall_steps = integer();
    else if (key == "threads") threads = count();
    else throw ConfigError("unknown config key '" + key + "'");
  }

  /** key=value override as passed to --set. */
  void apply_override(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not key=value");
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }

  /** Resolved parameters in key order; the basis of the config hash. */
  std::map<std::string, std::string> entries() const {
    using detail::format_real;
    std::map<std::string, std::string> e;
    e["experiment"] = experiment;
    e["H"] = format_real(hurst);
    e["q"] = format_real(q);
    e["d"] = std::to_string(d);
    e["dt_exponent"] = std::to_string(dt_exponent);
    e["window"] = format_real(window);
    e["fbm_method"] = fbm_method;
    e["alpha"] = format_real(alpha);
    e["alpha_prime"] = format_real(alpha_prime);
    e["mu"] = format_real(mu);
    e["nu"] = format_real(nu);
    e["stopping_tol"] = format_real(stopping_tol);
    e["gamma"] = format_real(gamma);
    e["sigma"] = format_real(sigma);
    e["delta"] = format_real(delta);
    e["n_modes"] = std::to_string(n_modes);
    e["drift"] = drift;
    e["drift_scale"] = format_real(drift_scale);
    e["forcing"] = format_real(forcing);
    e["diffusion"] = diffusion;
    e["channel_scale"] = detail::join(channel_scale);
    e["y0_amplitude"] = format_real(y0_amplitude);
    e["y0_mode"] = std::to_string(y0_mode);
    e["scheme"] = scheme;
    e["solver_tol"] = format_real(solver_tol);
    e["max_iters"] = std::to_string(max_iters);
    e["horizon"] = format_real(horizon);
    e["lemma_c"] = format_real(lemma_c);
    e["d1"] = d1 ? format_real(*d1) : "none";
    e["epsilon"] = format_real(epsilon);
    e["i_max"] = std::to_string(i_max);
    e["bundle_size"] = std::to_string(bundle_size);
    e["bundle_radius"] = format_real(bundle_radius);
    e["bundle_seed"] = std::to_string(bundle_seed);
    e["etas"] = detail::join(etas);
    e["seeds"] = detail::join(resolved_seeds());
    e["stopping_index"] = std::to_string(stopping_index);
    e["audit_intervals"] = std::to_string(audit_intervals);
    e["calibration"] = std::to_string(calibration);
    e["audit_safety"] = format_real(audit_safety);
    e["gronwall_draws"] = std::to_string(gronwall_draws);
    e["gronwall_steps"] = std::to_string(gronwall_steps);
    // threads only changes scheduling, never results, so it stays out of the hash
    return e;
  }

  CoefficientSpec coefficients() const {
    CoefficientSpec cs;
    if (drift == "zero") cs.drift = DriftKind::zero;
    else if (drift == "linear") cs.drift = DriftKind::linear;
    else if (drift == "sine") cs.drift = DriftKind::sine;
    else throw ConfigError("drift must be zero, linear or sine");
    if (diffusion == "zero") cs.diffusion = DiffusionKind::zero;
    else if (diffusion == "linear") cs.diffusion = DiffusionKind::linear;
    else if (diffusion == "additive") cs.diffusion = DiffusionKind::additive;
    else throw ConfigError("diffusion must be zero, linear or additive");
    cs.drift_scale = drift_scale;
    cs.forcing = forcing;
    cs.channel_scale = channel_scale;
    cs.sigma = sigma;
    cs.delta = delta;
    cs.gamma = gamma;
    return cs;
  }

  FbmMethod method() const {
    if (fbm_method == "automatic") return FbmMethod::automatic;
    if (fbm_method == "circulant") return FbmMethod::circulant;
    if (fbm_method == "cholesky") return FbmMethod::cholesky;
    throw ConfigError("fbm_method must be automatic, circulant or cholesky");
  }

  SolverOptions solver() const {
    SolverOptions o;
    if (scheme == "explicit") o.scheme = Scheme::explicit_march;
    else if (scheme == "picard") o.scheme = Scheme::picard;
    else throw ConfigError("scheme must be explicit or picard");
    o.tol = solver_tol;
    o.max_iters = max_iters;
    return o;
  }

  StoppingParams stopping() const { return {alpha, mu, stopping_tol}; }

  AttractorParams attractor() const {
    AttractorParams p;
    p.mu = mu;
    p.nu = nu;
    p.lambda = 2.0;
    p.c = lemma_c;
    p.epsilon = epsilon;
    p.i_max = i_max;
    p.bundle_size = bundle_size;
    p.bundle_radius = bundle_radius;
    p.bundle_seed = bundle_seed;
    return p;
  }

  SpectralField initial_field() const {
    SpectralField y0 = SpectralField::Zero(static_cast<Eigen::Index>(n_modes));
    y0[static_cast<Eigen::Index>(y0_mode - 1)] = y0_amplitude;
    return y0;
  }
};

/** Reads a flat key = value file; '#' starts a comment. */
inline ExperimentConfig load_config(const std::string& file, ExperimentConfig cfg = {}) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(file + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      cfg.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(file + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

/**
 * Names of violated constraints, empty when the configuration is admissible.
 * The spacing constraints of the absorbing-set construction need a lower bound
 * d1 for the stopping-time spacing and are only checked when d1 is given.
 */
inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> out;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) out.push_back("experiment name");
  if (!(c.alpha > 1.0 / 3.0)) out.push_back("1/3 < alpha");
  if (!(c.alpha < c.alpha_prime)) out.push_back("alpha < alpha_prime");
  if (!(c.alpha_prime < c.hurst)) out.push_back("alpha_prime < H");
  if (!(c.hurst <= 0.5)) out.push_back("H <= 1/2");
  if (!(c.mu > 0.0 && c.mu < 1.0)) out.push_back("mu in (0,1)");
  if (!(c.nu > 0.0)) out.push_back("nu > 0");
  if (!(c.q > 0.0)) out.push_back("q > 0");
  if (c.d < 1) out.push_back("d >= 1");
  if (c.n_modes < 1) out.push_back("n_modes >= 1");
  if (c.y0_mode < 1 || c.y0_mode > c.n_modes) out.push_back("1 <= y0_mode <= n_modes");
  if (c.dt_exponent < 1 || c.dt_exponent > 24) out.push_back("1 <= dt_exponent <= 24");
  if (!(c.window >= 1.0)) out.push_back("window >= 1");
  if (!(c.stopping_tol > 0.0)) out.push_back("stopping_tol > 0");
  if (!(c.horizon > 0.0)) out.push_back("horizon > 0");
  if (c.i_max < 1) out.push_back("i_max >= 1");
  if (c.stopping_index < 1) out.push_back("stopping_index >= 1");
  if (c.audit_intervals < 1) out.push_back("audit_intervals >= 1");
  if (c.calibration < 1) out.push_back("calibration >= 1");
  if (c.bundle_size < 1) out.push_back("bundle_size >= 1");
  if (c.etas.empty()) out.push_back("etas non-empty");
  for (double e : c.etas)
    if (!(e > 0.0 && e < c.window)) {
      out.push_back("0 < eta < window");
      break;
    }
  if (c.resolved_seeds().empty()) out.push_back("seeds non-empty");
  if (c.experiment == "bounds-audit" && c.resolved_seeds().size() <= c.calibration)
    out.push_back("seeds > calibration");
  if (c.channel_scale.size() != c.d) out.push_back("channel_scale has d entries");
  try {
    const auto cs = c.coefficients();
    (void)c.method();
    (void)c.solver();
    if (c.n_modes >= 1) {
      const auto m = SpectralModel::dirichlet(c.n_modes);
      for (auto& v : coefficient_violations(m, cs, c.mu, c.alpha)) out.push_back(v);
    }
  } catch (const ConfigError& e) {
    out.push_back(e.what());
  }
  const auto ap = c.attractor();
  if (!(c.lemma_c > 0.0)) out.push_back("lemma_c > 0");
  else if (c.d1) {
    for (auto& v : ap.violations(*c.d1)) out.push_back(v);
  } else {
    // without d1 only the conditions on k1 alone can be checked
    for (auto& v : ap.violations(std::numeric_limits<double>::infinity()))
      if (v == "k1(mu) < 1" || v == "-(2/lambda) log k1(mu) > 1") out.push_back(v);
  }
  return out;
}

/** 64-bit FNV-1a over "key=value\n" lines of the resolved configuration. */
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [k, v] : c.entries()) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace rough_attractor

#endif
