#ifndef ROUGH_ATTRACTOR_ATTRACTOR_HPP
#define ROUGH_ATTRACTOR_ATTRACTOR_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fbm.hpp"
#include "grid.hpp"
#include "rde.hpp"
#include "roughpath.hpp"
#include "spectral.hpp"
#include "stopping.hpp"

namespace rough_attractor {

struct GronwallParams {
  double k0 = 0.0, k1 = 0.0, k2 = 0.0;
  double lambda_star = 2.0;
  double v0 = 0.0;
  std::vector<double> t;  // t[0] = 0, increasing

  /** k0 = C/(1 - C mu), k1 = k2 = C mu/(1 - C mu). */
  static GronwallParams from_constant(double c, double mu, double lambda, double v0,
                                      std::vector<double> t) {
    if (!(c * mu < 1.0)) throw DomainError("C mu < 1 violated");
    GronwallParams p;
    p.k0 = c / (1.0 - c * mu);
    p.k1 = p.k2 = c * mu / (1.0 - c * mu);
    p.lambda_star = lambda;
    p.v0 = v0;
    p.t = std::move(t);
    return p;
  }

  void validate() const {
    if (!(k0 >= 0.0 && k1 >= 0.0 && k2 >= 0.0 && v0 >= 0.0)) throw DomainError("gronwall: constants must be >= 0");
    if (!(k1 < 1.0)) throw DomainError("gronwall: k1 < 1 violated");
    if (!(lambda_star > 0.0)) throw DomainError("gronwall: lambda* > 0 violated");
    if (t.empty() || t[0] != 0.0) throw DomainError("gronwall: t_0 = 0 required");
    const double gap = k1 > 0.0 ? -(2.0 / lambda_star) * std::log(k1) : std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (!(t[i] > t[i - 1])) throw DomainError("gronwall: t must be increasing");
      if (t[i] - t[i - 1] > gap * (1.0 + 1e-12))
        throw DomainError("gronwall: gap t_{i-1} - t_{i-2} <= -(2/lambda*) log k1 violated");
    }
  }
};

/**
 * (k0 v0 + k2)(1+k1)^{i-1} e^{-(lambda* / 2) t_{i-1}}
 *   + sum_{m=1}^{i-1} 2 k2 (1+k1)^{i-1-m} e^{-(lambda* / 2)(t_{i-1} - t_m)}.
 */
inline double gronwall_bound(const GronwallParams& p, int i) {
  if (i < 1) throw DomainError("gronwall_bound: i >= 1 required");
  if (static_cast<std::size_t>(i) > p.t.size()) throw DomainError("gronwall_bound: t_{i-1} not provided");
  const double h = p.lambda_star / 2.0;
  const double ti = p.t[static_cast<std::size_t>(i - 1)];
  double out = (p.k0 * p.v0 + p.k2) * std::pow(1.0 + p.k1, i - 1) * std::exp(-h * ti);
  for (int m = 1; m <= i - 1; ++m)
    out += 2.0 * p.k2 * std::pow(1.0 + p.k1, i - 1 - m) * std::exp(-h * (ti - p.t[static_cast<std::size_t>(m)]));
  return out;
}

/** U_1..U_n solving the recursion with equality:
 * U_i = k0 v0 e^{-l t_{i-1}} + sum_{m<i} k1 U_m e^{-l(t_{i-1}-t_m)} + sum_{m<i} k2 e^{-l(t_{i-1}-t_m)} + k2. */
inline std::vector<double> gronwall_recursion(const GronwallParams& p, int n) {
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  const double l = p.lambda_star;
  for (int i = 1; i <= n; ++i) {
    const double ti = p.t[static_cast<std::size_t>(i - 1)];
    double v = p.k0 * p.v0 * std::exp(-l * ti) + p.k2;
    for (int m = 1; m < i; ++m) {
      const double e = std::exp(-l * (ti - p.t[static_cast<std::size_t>(m)]));
      v += (p.k1 * u[static_cast<std::size_t>(m)] + p.k2) * e;
    }
    u[static_cast<std::size_t>(i)] = v;
  }
  return u;
}

/** Constants of the absorbing-set construction. */
struct AttractorParams {
  double mu = 0.1;
  double nu = 0.05;
  double lambda = 2.0;
  double c = 1.0;  // interval-estimate constant C; k1 = k2 = C mu / (1 - C mu), k0 = C / (1 - C mu)
  double epsilon = 1e-10;
  int i_max = 30;
  std::size_t bundle_size = 8;
  double bundle_radius = 1.0;  // rho(i) = bundle_radius (1 + i)
  std::uint64_t bundle_seed = 7;

  double k1() const { return c * mu / (1.0 - c * mu); }
  double k0() const { return c / (1.0 - c * mu); }
  double k2() const { return k1(); }

  /** Constraint names that fail for the given spacing lower bound d1. */
  std::vector<std::string> violations(double d1) const {
    std::vector<std::string> out;
    if (!(c * mu < 1.0) || !(k1() < 1.0)) {
      out.push_back("k1(mu) < 1");
      return out;
    }
    if (!(-(2.0 / lambda) * std::log(k1()) > 1.0)) out.push_back("-(2/lambda) log k1(mu) > 1");
    if (!(d1 > 2.0 * (std::log(1.0 + k1()) + nu) / lambda)) out.push_back("d1 > 2(log(1+k1)+nu)/lambda");
    if (!(nu + d1 > 1.0)) out.push_back("nu + d1 > 1");
    return out;
  }
};

/** Raised when the absorbing-radius series diverges. */
class RadiusDivergence : public Error {
 public:
  using Error::Error;
};

struct RadiusReport {
  double radius = 0.0;
  std::int64_t truncation_index = 0;  // last m summed explicitly
  double tail = 0.0;                  // geometric tail estimate beyond the truncation
  double ratio = 0.0;                 // estimated term ratio (1+k1) e^{-(lambda/2) mean gap}
  bool window_exhausted = false;
};

/**
 * R = 2 sum_{m <= 0} 2 k2 (1+k1)^{-m} e^{(lambda/2) T_m(theta_{T_base} W)} with
 * T_m(theta_{T_base} W) = T_{base+m} - T_base. Terms are summed until the geometric
 * tail estimated from the mean spacing falls below epsilon times the partial sum,
 * or until the stored sequence runs out; the tail estimate is always added.
 */
inline RadiusReport absorbing_radius(const StoppingSequence& seq, std::int64_t base,
                                     const AttractorParams& p) {
  RadiusReport out;
  const double k1 = p.k1(), k2 = p.k2();
  if (k2 == 0.0) return out;
  if (base > seq.i_max() || base - 1 < seq.i_min())
    throw DomainError("absorbing_radius: need T_base and at least one earlier stopping time");
  const double tb = seq.time(base);
  double partial = 0.0;
  for (std::int64_t m = 0;; --m) {
    const double tm = seq.time(base + m) - tb;
    const double term = 2.0 * k2 * std::pow(1.0 + k1, static_cast<double>(-m)) * std::exp(0.5 * p.lambda * tm);
    partial += term;
    out.truncation_index = m;
    if (m == 0) continue;
    const double mean_gap = -tm / static_cast<double>(-m);
    out.ratio = (1.0 + k1) * std::exp(-0.5 * p.lambda * mean_gap);
    const bool last = base + m - 1 < seq.i_min();
    if (out.ratio < 1.0) {
      out.tail = term * out.ratio / (1.0 - out.ratio);
      if (out.tail < p.epsilon * partial) break;
    }
    if (last) {
      if (out.ratio >= 1.0) {
        throw RadiusDivergence(
            "absorbing_radius: series diverges; constraint d1 > 2 log(1+k1)/lambda violated (mean gap " +
            std::to_string(mean_gap) + ", term ratio " + std::to_string(out.ratio) + ")");
      }
      out.window_exhausted = true;
      break;
    }
  }
  out.radius = 2.0 * (partial + out.tail);
  return out;
}

/** Snapped grid indices and times of Phi(i, j): solve from T_j to T_j + T_i(theta_{T_j} W). */
struct PhiInterval {
  std::size_t k_start = 0, k_end = 0;
  double t_start = 0.0, t_end = 0.0;
};

inline PhiInterval phi_interval(const RoughPathGrid& rp, const StoppingParams& sp, std::int64_t i,
                                std::int64_t j) {
  if (i < 0) throw DomainError("phi_step: i >= 0 required");
  const auto seq = build_sequence(rp, sp, std::min<std::int64_t>(j, 0), std::max<std::int64_t>(j, 0));
  const double tj = seq.time(j);
  const auto rel = build_sequence(rp, sp, 0, i, tj);
  PhiInterval out;
  out.t_start = tj;
  out.t_end = rel.time(i);
  out.k_start = rp.grid().floor_index(tj);
  out.k_end = rp.grid().floor_index(out.t_end);
  if (i == 0) out.k_end = out.k_start;
  return out;
}

/** Phi(i, j, y0): state at T_j + T_i(theta_{T_j} W) of the solution started at T_j. */
inline SpectralField phi_step(const SpectralModel& m, const CoefficientSpec& cs, const SpectralField& y0,
                              const RoughPathGrid& rp, const StoppingParams& sp, std::int64_t i,
                              std::int64_t j) {
  if (i == 0) return y0;
  const auto iv = phi_interval(rp, sp, i, j);
  return march(m, cs, y0, rp, iv.k_start, iv.k_end);
}

/** Unit directions (B norm) of a test bundle, fixed by the seed. */
inline std::vector<SpectralField> bundle_directions(std::size_t modes, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<SpectralField> out;
  for (std::size_t b = 0; b < count; ++b) {
    SpectralField v(static_cast<Eigen::Index>(modes));
    for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = normal(rng) / static_cast<double>(k + 1);
    out.push_back(v / v.norm());
  }
  return out;
}

inline double bundle_diameter(const std::vector<SpectralField>& pts) {
  double d = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) d = std::max(d, (pts[a] - pts[b]).norm());
  return d;
}

/** max_{a in A} min_{b in B} |a - b| in the B norm. */
inline double hausdorff_one_sided(const std::vector<SpectralField>& A, const std::vector<SpectralField>& B) {
  if (A.empty() || B.empty()) throw DomainError("hausdorff_one_sided: empty set");
  double out = 0.0;
  for (const auto& a : A) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : B) best = std::min(best, (a - b).norm());
    out = std::max(out, best);
  }
  return out;
}

struct PullbackReport {
  RadiusReport radius;                 // R(0, omega)
  std::vector<double> start_times;     // snapped T_{-i}, i = 1..i_max
  std::vector<double> sup_series;      // bundle sup B-norm at time 0 after i pullback steps
  std::vector<double> diam_series;     // bundle diameter at time 0
  std::vector<double> radius_series;   // initial bundle radius rho(i)
  int absorb_index = -1;               // first i with sup <= R for all later i
  std::vector<SpectralField> sample;   // bundle image at i_max
  StoppingSequence sequence;
};

/**
 * Evolves the test bundle {rho(i) u_b} from the snapped time T_{-i} to time 0 for
 * i = 1..i_max and records its sup norm and diameter; R(0, omega) is the absorbing
 * radius at base index -1. With series = false only i = i_max is evolved.
 */
inline PullbackReport pullback_estimate(const SpectralModel& m, const CoefficientSpec& cs,
                                        const RoughPathGrid& rp, const StoppingParams& sp,
                                        const AttractorParams& p, bool series = true) {
  if (p.i_max < 1) throw DomainError("pullback_estimate: i_max >= 1 required");
  PullbackReport out;
  out.sequence = build_sequence(rp, sp, -p.i_max, 0);
  const auto& g = rp.grid();
  const std::size_t k0 = g.checked_index(0.0, "pullback_estimate");
  out.radius = out.sequence.i_min() <= -2 ? absorbing_radius(out.sequence, -1, p) : RadiusReport{};
  const auto dirs = bundle_directions(m.size(), p.bundle_size, p.bundle_seed);
  for (int i = series ? 1 : p.i_max; i <= p.i_max; ++i) {
    const std::size_t ks = out.sequence.grid_index(-i, g);
    const double rho = p.bundle_radius * (1.0 + i);
    std::vector<SpectralField> imgs;
    imgs.reserve(dirs.size());
    for (const auto& u : dirs) imgs.push_back(march(m, cs, rho * u, rp, ks, k0));
    double sup = 0.0;
    for (const auto& y : imgs) sup = std::max(sup, y.norm());
    out.start_times.push_back(g.time(ks));
    out.sup_series.push_back(sup);
    out.diam_series.push_back(bundle_diameter(imgs));
    out.radius_series.push_back(rho);
    if (i == p.i_max) out.sample = std::move(imgs);
  }
  const int first = p.i_max - static_cast<int>(out.sup_series.size()) + 1;
  for (int i = p.i_max; i >= first; --i) {
    if (out.sup_series[static_cast<std::size_t>(i - first)] <= out.radius.radius)
      out.absorb_index = i;
    else
      break;
  }
  return out;
}

struct SemicontinuityRow {
  double eta = 0.0;
  double dist = 0.0;            // one-sided Hausdorff dist(A_eta sample, A sample)
  double stopping_dev = 0.0;    // max_i |T_i(W^eta) - T_i(W)| over -i_max <= i <= 0
  double noise_dist = 0.0;      // rho_alpha(W^eta, W) on [-1, 0]
  PullbackReport report;
};

/** Matched-seed comparison of attractor samples under W and the Wong-Zakai drivers W^eta. */
inline std::vector<SemicontinuityRow> semicontinuity_experiment(
    const SpectralModel& m, const CoefficientSpec& cs, const GridPath& path, const StoppingParams& sp,
    const AttractorParams& p, const std::vector<double>& etas, PullbackReport* limit = nullptr) {
  const auto rp = canonical_lift(path);
  const auto base = pullback_estimate(m, cs, rp, sp, p, false);
  std::vector<SemicontinuityRow> rows;
  for (double eta : etas) {
    const auto rpe = canonical_lift(wong_zakai_smooth(path, eta));
    SemicontinuityRow row;
    row.eta = eta;
    row.report = pullback_estimate(m, cs, rpe, sp, p, false);
    row.dist = hausdorff_one_sided(row.report.sample, base.sample);
    for (std::int64_t i = -p.i_max; i <= 0; ++i)
      row.stopping_dev = std::max(row.stopping_dev, std::abs(row.report.sequence.time(i) - base.sequence.time(i)));
    row.noise_dist = rough_distance(rpe, rp, sp.alpha, -1.0, 0.0);
    rows.push_back(std::move(row));
  }
  if (limit) *limit = base;
  return rows;
}

/** Per-interval controlled-norm estimate along a solution started at time 0. */
struct IntervalAudit {
  std::vector<double> dnorm;     // D_i on [T_{i-1}, T_i] (snapped)
  std::vector<double> rhs_unit;  // RHS / C
  std::vector<double> ratio;     // D_i / (RHS / C): the smallest admissible C on interval i
  std::vector<double> phi_norm;  // |y(T_i)| in B
  std::vector<double> times;     // snapped T_0..T_n
};

/**
 * D_i and mu sum_{m<i} (1 + D_m) e^{-lambda(T_{i-1}-T_m)} + mu (1 + D_i) + e^{-lambda T_{i-1}} |y0|_gamma
 * for i = 1..n.
 */
inline IntervalAudit interval_audit(const SpectralModel& m, const CoefficientSpec& cs, const SpectralField& y0,
                                    const RoughPathGrid& rp, const StoppingParams& sp, double gamma,
                                    int n) {
  const auto seq = build_sequence(rp, sp, 0, n);
  const auto& g = rp.grid();
  IntervalAudit out;
  for (int i = 0; i <= n; ++i) out.times.push_back(seq.snapped(i, g));
  const double lam = m.spectrum().lambda();
  const auto sol = solve_rde(m, cs, y0, rp, out.times.front(), out.times.back());
  const double y0n = interp_norm(m.spectrum(), y0, gamma);
  for (int i = 1; i <= n; ++i) {
    const double a = out.times[static_cast<std::size_t>(i - 1)], b = out.times[static_cast<std::size_t>(i)];
    const double di = b > a ? dnorm(m, sol, rp, gamma, sp.alpha, a, b).total()
                            : interp_norm(m.spectrum(), sol.state(sol.grid().checked_index(a, "audit")), gamma);
    double rhs = 0.0;
    for (int k = 1; k < i; ++k)
      rhs += sp.mu * (1.0 + out.dnorm[static_cast<std::size_t>(k - 1)]) *
             std::exp(-lam * (a - out.times[static_cast<std::size_t>(k)]));
    rhs += sp.mu * (1.0 + di) + std::exp(-lam * a) * y0n;
    out.dnorm.push_back(di);
    out.rhs_unit.push_back(rhs);
    out.ratio.push_back(di / rhs);
    out.phi_norm.push_back(sol.state(sol.grid().checked_index(b, "audit")).norm());
  }
  return out;
}

}  // namespace rough_attractor

#endif
