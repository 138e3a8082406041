#ifndef ROUGH_ATTRACTOR_EXPERIMENTS_HPP
#define ROUGH_ATTRACTOR_EXPERIMENTS_HPP

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "attractor.hpp"
#include "config.hpp"
#include "fbm.hpp"
#include "rde.hpp"
#include "roughpath.hpp"
#include "spectral.hpp"
#include "stopping.hpp"

#ifndef ROUGH_ATTRACTOR_VERSION
#define ROUGH_ATTRACTOR_VERSION "0.0.0"
#endif

namespace rough_attractor {

using json = nlohmann::json;

/** Raised for configurations that fail validate_config. */
class ConstraintError : public Error {
 public:
  explicit ConstraintError(std::vector<std::string> names)
      : Error("constraint violated: " + joined(names)), names_(std::move(names)) {}
  const std::vector<std::string>& names() const { return names_; }

 private:
  static std::string joined(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& n : v) s += (s.empty() ? "" : "; ") + n;
    return s;
  }
  std::vector<std::string> names_;
};

/**
 * Runs fn(0..n-1) on a small worker pool. Jobs write only to their own slot, so
 * the aggregated result is independent of scheduling; if several jobs throw, the
 * exception of the lowest job index is rethrown.
 */
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

/** CSV writer with the fixed %.17g float format. */
class Csv {
 public:
  Csv(const std::filesystem::path& file, const std::string& header) : f_(std::fopen(file.string().c_str(), "w")) {
    if (!f_) throw Error("cannot write " + file.string());
    std::fprintf(f_, "%s\n", header.c_str());
  }
  Csv(const Csv&) = delete;
  Csv& operator=(const Csv&) = delete;
  ~Csv() {
    if (f_) std::fclose(f_);
  }

  template <class... Ts>
  void row(const Ts&... vs) {
    bool first = true;
    (put(vs, first), ...);
    std::fputc('\n', f_);
  }

 private:
  void sep(bool& first) {
    if (!first) std::fputc(',', f_);
    first = false;
  }
  void put(double v, bool& first) {
    sep(first);
    std::fprintf(f_, "%.17g", v);
  }
  void put(const std::string& v, bool& first) {
    sep(first);
    std::fputs(v.c_str(), f_);
  }
  void put(const char* v, bool& first) { put(std::string(v), first); }
  template <class I, std::enable_if_t<std::is_integral_v<I>, int> = 0>
  void put(I v, bool& first) {
    sep(first);
    std::fputs(std::to_string(v).c_str(), f_);
  }

  std::FILE* f_;
};

inline void write_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

inline GridPath driver_path(const ExperimentConfig& c, std::uint64_t seed) {
  const double dt = c.dt();
  const auto n = static_cast<std::size_t>(std::llround(2.0 * c.window / dt)) + 1;
  return sample_fbm(FbmParams{c.hurst, c.q, c.d, seed}, -c.window, dt, n, c.method());
}

/** Least-squares slope of log y against log x. */
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

using Emitter = std::vector<std::string>;

inline json noise_convergence(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seeds = c.resolved_seeds();
  struct Row {
    std::vector<double> rho;
    double slope = 0.0;
    bool decreasing = false;
  };
  std::vector<Row> rows(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t s) {
    const auto path = driver_path(c, seeds[s]);
    const auto rp = canonical_lift(path);
    for (double eta : c.etas)
      rows[s].rho.push_back(rough_distance(rp, canonical_lift(wong_zakai_smooth(path, eta)), c.alpha_prime, 0.0,
                                           c.horizon));
  });
  // slope over the three smallest eta
  std::vector<std::size_t> order(c.etas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.etas[a] < c.etas[b]; });
  order.resize(std::min<std::size_t>(3, order.size()));
  Csv csv(dir / "noise_convergence.csv", "seed,eta,rho");
  files.push_back("noise_convergence.csv");
  json records = json::array();
  int decreasing = 0;
  double min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    auto& r = rows[s];
    std::vector<double> x, y;
    for (auto i : order) {
      x.push_back(c.etas[i]);
      y.push_back(r.rho[i]);
    }
    r.slope = x.size() >= 2 ? loglog_slope(x, y) : 0.0;
    r.decreasing = strictly_decreasing(r.rho);
    decreasing += r.decreasing;
    min_slope = std::min(min_slope, r.slope);
    for (std::size_t e = 0; e < c.etas.size(); ++e) csv.row(seeds[s], c.etas[e], r.rho[e]);
    records.push_back({{"seed", seeds[s]}, {"H", c.hurst}, {"q", c.q}, {"alpha_prime", c.alpha_prime},
                       {"eta", c.etas}, {"rho", r.rho}, {"slope", r.slope}, {"strictly_decreasing", r.decreasing}});
  }
  return {{"records", records},
          {"summary",
           {{"seeds", seeds.size()}, {"strictly_decreasing", decreasing}, {"min_slope", min_slope},
            {"slope_reference", c.hurst - c.alpha_prime - 0.05}}}};
}

inline json stopping(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seeds = c.resolved_seeds();
  const auto sp = c.stopping();
  const std::int64_t K = c.stopping_index;
  struct Row {
    StoppingSequence seq;
    CountBound cb;
    double d1 = 0.0, residual = 0.0, direct_residual = 0.0, reflection = 0.0;
  };
  std::vector<Row> rows(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t s) {
    const auto rp = canonical_lift(driver_path(c, seeds[s]));
    auto& r = rows[s];
    r.seq = build_sequence(rp, sp, -K, K);
    for (std::int64_t i = -K + 1; i <= K; ++i) {
      const double from = r.seq.time(i - 1), to = r.seq.time(i);
      // forward step from T_{i-1} and its reflection back from T_i
      r.residual = std::max(r.residual, forward_stopping_time(rp, sp, from).residual);
      const double back = backward_stopping_time(rp, sp, to).tau;
      r.reflection = std::max(r.reflection, std::abs(back + (to - from)));
    }
    // all-pairs evaluation of the defining equation at T_1, independent of the sweep
    r.direct_residual = stopping_residual(rp, sp, 0.0, r.seq.time(1));
    r.cb = count_bound_check(rp, sp, c.alpha_prime);
    r.d1 = estimate_d1({rp}, sp, c.alpha_prime, {0.0}).d1;
  });
  json records = json::array();
  double residual = 0.0, reflection = 0.0;
  int over = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto& r = rows[s];
    residual = std::max({residual, r.residual, r.direct_residual});
    reflection = std::max(reflection, r.reflection);
    over += static_cast<double>(r.cb.count) > r.cb.bound;
    const std::string name = "stopping_seed" + std::to_string(seeds[s]) + ".csv";
    Csv csv(dir / name, "i,T_i");
    files.push_back(name);
    for (std::int64_t i = -K; i <= K; ++i) csv.row(i, r.seq.time(i));
    records.push_back({{"seed", seeds[s]}, {"q", c.q}, {"mu", c.mu}, {"alpha", c.alpha},
                       {"alpha_prime", c.alpha_prime}, {"d1", r.d1}, {"count", r.cb.count}, {"bound", r.cb.bound},
                       {"max_residual", r.residual}, {"direct_residual_T1", r.direct_residual},
                       {"max_reflection_error", r.reflection},
                       {"backward_spacing", backward_spacing(r.seq)}});
  }
  return {{"records", records},
          {"summary",
           {{"samples", seeds.size()},
            {"max_residual", residual},
            {"max_reflection_error", reflection},
            {"reflection_limit", 2.0 * sp.tol + c.dt()},
            {"count_bound_violations", over}}}};
}

inline json solve(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seed = c.resolved_seeds().front();
  const auto m = SpectralModel::dirichlet(c.n_modes);
  const auto cs = c.coefficients();
  const auto rp = canonical_lift(driver_path(c, seed));
  const auto y = solve_rde(m, cs, c.initial_field(), rp, 0.0, c.horizon, c.solver());
  const auto running = dnorm_running(m, y, rp, c.gamma, c.alpha, 0.0, c.horizon);
  {
    Csv csv(dir / "solve.csv", "t,norm0,normgamma,dnorm_total");
    for (std::size_t k = 0; k < y.grid().n; ++k) {
      const auto yk = y.state(k);
      csv.row(y.grid().time(k), yk.norm(), interp_norm(m.spectrum(), yk, c.gamma), running[k].total());
    }
  }
  files.push_back("solve.csv");
  write_field_csv(y.final_state(), (dir / "solve_final.csv").string());
  files.push_back("solve_final.csv");
  std::vector<std::size_t> probe;
  for (std::size_t k = 0; k < y.grid().n; k += std::max<std::size_t>(1, y.grid().n / 16)) probe.push_back(k);
  probe.push_back(y.grid().n - 1);
  const auto& last = running.back();
  return {{"summary",
           {{"seed", seed},
            {"horizon", c.horizon},
            {"final_norm", y.final_state().norm()},
            {"mild_residual", mild_residual(m, cs, y, rp, probe)},
            {"dnorm",
             {{"sup_y", last.sup_y}, {"sup_yp", last.sup_yp}, {"holder_yp", last.holder_yp},
              {"holder_R_alpha", last.holder_R_alpha}, {"holder_R_2alpha", last.holder_R_2alpha},
              {"total", last.total()}}}}}};
}

/** Random parameters satisfying the discrete Groenwall hypotheses. */
inline GronwallParams gronwall_draw(std::mt19937_64& rng, int steps) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GronwallParams p;
  p.k1 = 0.02 + 0.6 * u(rng);
  p.k2 = u(rng);
  p.k0 = 3.0 * u(rng);
  p.v0 = 5.0 * u(rng);
  p.lambda_star = 0.5 + 3.5 * u(rng);
  const double gap = -(2.0 / p.lambda_star) * std::log(p.k1);
  p.t = {0.0};
  for (int i = 1; i < steps; ++i) p.t.push_back(p.t.back() + gap * (0.05 + 0.95 * u(rng)));
  return p;
}

inline json gronwall(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  std::mt19937_64 rng(c.resolved_seeds().front());
  Csv csv(dir / "gronwall.csv", "draw,i,U,bound");
  files.push_back("gronwall.csv");
  int violations = 0;
  double first_diff = 0.0, worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.gronwall_draws; ++k) {
    const auto p = gronwall_draw(rng, c.gronwall_steps);
    p.validate();
    const auto u = gronwall_recursion(p, c.gronwall_steps);
    for (int i = 1; i <= c.gronwall_steps; ++i) {
      const double b = gronwall_bound(p, i);
      const double ui = u[static_cast<std::size_t>(i)];
      csv.row(k, i, ui, b);
      if (ui > b) ++violations;
      worst = std::max(worst, (ui - b) / b);
      if (i == 1) first_diff = std::max(first_diff, std::abs(ui - b));
    }
  }
  return {{"summary",
           {{"draws", c.gronwall_draws},
            {"steps", c.gronwall_steps},
            {"violations", violations},
            {"max_relative_excess", worst},
            {"first_row_max_difference", first_diff}}}};
}

inline json pullback(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seeds = c.resolved_seeds();
  const auto m = SpectralModel::dirichlet(c.n_modes);
  const auto cs = c.coefficients();
  const auto sp = c.stopping();
  const auto ap = c.attractor();
  std::vector<PullbackReport> reps(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t s) {
    reps[s] = pullback_estimate(m, cs, canonical_lift(driver_path(c, seeds[s])), sp, ap);
  });
  Csv csv(dir / "pullback.csv", "seed,i,start_time,rho,sup,diam,R0");
  files.push_back("pullback.csv");
  json records = json::array();
  int absorbed = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto& r = reps[s];
    for (std::size_t i = 0; i < r.sup_series.size(); ++i)
      csv.row(seeds[s], i + 1, r.start_times[i], r.radius_series[i], r.sup_series[i], r.diam_series[i],
              r.radius.radius);
    const std::string name = "pullback_sample_seed" + std::to_string(seeds[s]) + ".csv";
    Csv sample(dir / name, "b,k,coeff");
    files.push_back(name);
    for (std::size_t b = 0; b < r.sample.size(); ++b)
      for (Eigen::Index k = 0; k < r.sample[b].size(); ++k) sample.row(b, k + 1, r.sample[b][k]);
    const double spacing = backward_spacing(r.sequence);
    absorbed += r.absorb_index >= 1;
    records.push_back({{"seed", seeds[s]},
                       {"mu", c.mu},
                       {"nu", c.nu},
                       {"q", c.q},
                       {"H", c.hurst},
                       {"eta", nullptr},
                       {"R0", r.radius.radius},
                       {"R0_term_ratio", r.radius.ratio},
                       {"R0_tail", r.radius.tail},
                       {"absorb_index", r.absorb_index},
                       {"sup_series", r.sup_series},
                       {"diam_series", r.diam_series},
                       {"dist_to_limit", nullptr},
                       {"backward_spacing", spacing},
                       {"spacing_constraints_failed", ap.violations(spacing)}});
  }
  return {{"records", records}, {"summary", {{"samples", seeds.size()}, {"absorbed", absorbed}}}};
}

inline json semicontinuity(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seeds = c.resolved_seeds();
  const auto m = SpectralModel::dirichlet(c.n_modes);
  const auto cs = c.coefficients();
  const auto sp = c.stopping();
  const auto ap = c.attractor();
  std::vector<std::vector<SemicontinuityRow>> rows(seeds.size());
  std::vector<PullbackReport> limits(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t s) {
    rows[s] = semicontinuity_experiment(m, cs, driver_path(c, seeds[s]), sp, ap, c.etas, &limits[s]);
  });
  Csv csv(dir / "semicontinuity.csv", "seed,eta,dist,stopping_dev,noise_dist");
  files.push_back("semicontinuity.csv");
  json records = json::array(), per_seed = json::array();
  int dist_dec = 0, stop_dec = 0, both = 0;
  double smallest_dev = 0.0;
  std::vector<std::size_t> order(c.etas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return c.etas[a] > c.etas[b]; });
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::vector<double> eta, dist, dev;
    for (auto i : order) {
      const auto& r = rows[s][i];
      eta.push_back(r.eta);
      dist.push_back(std::max(r.dist, 1e-300));
      dev.push_back(std::max(r.stopping_dev, 1e-300));
    }
    for (const auto& r : rows[s]) {
      csv.row(seeds[s], r.eta, r.dist, r.stopping_dev, r.noise_dist);
      records.push_back({{"seed", seeds[s]},
                         {"mu", c.mu},
                         {"nu", c.nu},
                         {"q", c.q},
                         {"H", c.hurst},
                         {"eta", r.eta},
                         {"R0", r.report.radius.radius},
                         {"absorb_index", r.report.absorb_index},
                         {"diam_series", r.report.diam_series},
                         {"dist_to_limit", r.dist},
                         {"stopping_dev", r.stopping_dev},
                         {"noise_dist", r.noise_dist}});
    }
    // decrease along the ladder: positive log-log slope and last below first
    const bool dd = loglog_slope(eta, dist) > 0.0 && dist.back() < dist.front();
    const bool sd = loglog_slope(eta, dev) > 0.0 && dev.back() < dev.front();
    dist_dec += dd;
    stop_dec += sd;
    both += dd && sd;
    smallest_dev = std::max(smallest_dev, dev.back());
    per_seed.push_back({{"seed", seeds[s]},
                        {"dist_decreasing", dd},
                        {"stopping_dev_decreasing", sd},
                        {"dist_strictly_decreasing", strictly_decreasing(dist)},
                        {"stopping_dev_strictly_decreasing", strictly_decreasing(dev)},
                        {"smallest_eta_stopping_dev", dev.back()},
                        {"limit_R0", limits[s].radius.radius}});
  }
  return {{"records", records},
          {"seeds", per_seed},
          {"summary",
           {{"samples", seeds.size()}, {"dist_decreasing", dist_dec}, {"stopping_dev_decreasing", stop_dec},
            {"both_decreasing", both}, {"max_smallest_eta_stopping_dev", smallest_dev}, {"dt", c.dt()}}}};
}

inline json bounds_audit(const ExperimentConfig& c, const std::filesystem::path& dir, Emitter& files) {
  const auto seeds = c.resolved_seeds();
  const auto m = SpectralModel::dirichlet(c.n_modes);
  const auto cs = c.coefficients();
  const auto sp = c.stopping();
  const auto y0 = c.initial_field();
  std::vector<IntervalAudit> audits(seeds.size());
  parallel_for(seeds.size(), c.threads, [&](std::size_t s) {
    audits[s] = interval_audit(m, cs, y0, canonical_lift(driver_path(c, seeds[s])), sp, c.gamma, c.audit_intervals);
  });
  double cal_max = 0.0;
  for (std::size_t s = 0; s < c.calibration; ++s)
    for (double r : audits[s].ratio) cal_max = std::max(cal_max, r);
  const double C = c.audit_safety * cal_max;
  const double lambda = m.spectrum().lambda();
  const double v0 = interp_norm(m.spectrum(), y0, c.gamma);
  Csv csv(dir / "bounds_audit.csv", "seed,role,i,T_i,dnorm,rhs_unit,ratio,phi_norm,phi_bound");
  files.push_back("bounds_audit.csv");
  int dnorm_viol = 0, phi_viol = 0, hyp_fail = 0;
  double hold_max = 0.0, phi_worst = 0.0;
  json records = json::array();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const auto& a = audits[s];
    const bool holdout = s >= c.calibration;
    std::vector<double> t(a.times.begin(), a.times.end() - 1);
    for (auto& v : t) v -= a.times.front();
    bool hyp = C * c.mu < 1.0;
    GronwallParams gp;
    if (hyp) {
      gp = GronwallParams::from_constant(C, c.mu, lambda, v0, t);
      try {
        gp.validate();
      } catch (const DomainError&) {
        hyp = false;
      }
    }
    hyp_fail += holdout && !hyp;
    int dv = 0, pv = 0;
    for (std::size_t i = 0; i < a.dnorm.size(); ++i) {
      const double bound = hyp ? gronwall_bound(gp, static_cast<int>(i) + 1) : std::nan("");
      csv.row(seeds[s], holdout ? "holdout" : "calibration", i + 1, a.times[i + 1], a.dnorm[i], a.rhs_unit[i],
              a.ratio[i], a.phi_norm[i], bound);
      if (!holdout) continue;
      hold_max = std::max(hold_max, a.ratio[i]);
      if (!(a.dnorm[i] <= C * a.rhs_unit[i])) ++dv;
      if (!(a.phi_norm[i] <= bound)) ++pv;
      if (hyp) phi_worst = std::max(phi_worst, a.phi_norm[i] / bound);
    }
    dnorm_viol += dv;
    phi_viol += pv;
    records.push_back({{"seed", seeds[s]},
                       {"role", holdout ? "holdout" : "calibration"},
                       {"max_ratio", *std::max_element(a.ratio.begin(), a.ratio.end())},
                       {"dnorm_violations", dv},
                       {"phi_violations", pv}});
  }
  return {{"records", records},
          {"summary",
           {{"calibration_samples", c.calibration},
            {"holdout_samples", seeds.size() - c.calibration},
            {"intervals", c.audit_intervals},
            {"calibration_max_ratio", cal_max},
            {"safety", c.audit_safety},
            {"C_fit", C},
            {"k1", C * c.mu / (1.0 - C * c.mu)},
            {"holdout_max_ratio", hold_max},
            {"phi_max_bound_fraction", phi_worst},
            {"dnorm_violations", dnorm_viol},
            {"phi_violations", phi_viol},
            {"gronwall_hypothesis_failures", hyp_fail}}}};
}

}  // namespace detail

struct RunResult {
  json result;   // the document written to <experiment>.json
  json summary;  // its "summary" member
  std::vector<std::string> files;  // result files, manifest excluded
  double wall_seconds = 0.0;
};

/**
 * Validates the configuration, runs one experiment into dir and writes
 * <experiment>.json with the summary plus manifest.json. Result files are
 * byte-identical for a fixed configuration; the manifest carries the wall time.
 */
inline RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir) {
  if (auto v = validate_config(c); !v.empty()) throw ConstraintError(v);
  std::filesystem::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  const std::string& e = c.experiment;
  if (e == "noise-convergence") out.result = detail::noise_convergence(c, dir, out.files);
  else if (e == "stopping") out.result = detail::stopping(c, dir, out.files);
  else if (e == "solve") out.result = detail::solve(c, dir, out.files);
  else if (e == "gronwall") out.result = detail::gronwall(c, dir, out.files);
  else if (e == "pullback") out.result = detail::pullback(c, dir, out.files);
  else if (e == "semicontinuity") out.result = detail::semicontinuity(c, dir, out.files);
  else out.result = detail::bounds_audit(c, dir, out.files);
  std::string base = e;
  std::replace(base.begin(), base.end(), '-', '_');
  detail::write_json(dir / (base + ".json"), out.result);
  out.summary = out.result.value("summary", json::object());
  out.files.push_back(base + ".json");
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  json manifest = {{"experiment", e},
                   {"config_hash", hash},
                   {"config", c.entries()},
                   {"version", ROUGH_ATTRACTOR_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__},
                   {"wall_time_seconds", out.wall_seconds},
                   {"files", out.files}};
  detail::write_json(dir / "manifest.json", manifest);
  return out;
}

}  // namespace rough_attractor

#endif
