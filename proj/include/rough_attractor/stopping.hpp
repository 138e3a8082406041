#ifndef ROUGH_ATTRACTOR_STOPPING_HPP
#define ROUGH_ATTRACTOR_STOPPING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "grid.hpp"
#include "roughpath.hpp"

namespace rough_attractor {

struct StoppingParams {
  double alpha = 0.35;
  double mu = 0.1;
  double tol = 1e-10;

  void validate() const {
    if (!(alpha > 1.0 / 3.0 && alpha < 0.5))
      throw DomainError("stopping: alpha must lie in (1/3, 1/2)");
    if (!(mu > 0.0 && mu < 1.0)) throw DomainError("stopping: mu in (0,1) violated");
    if (!(tol > 0.0)) throw DomainError("stopping: tol must be positive");
  }
};

struct StoppingTime {
  double tau = 0.0;       // signed length: > 0 forward, < 0 backward
  double residual = 0.0;  // |norm + mu |tau|^(1-alpha) - mu| at the returned time
};

namespace detail {

struct PairValue {
  double v1;
  double v2;
};

/**
 * Incremental Hoelder sweep from an anchor a in one direction. Points are
 * {a} followed by successive grid points; for every point p already swept the
 * sweep keeps W and WW between p and the moving frontier, so a frontier step
 * costs O(points * d^2). Forward sweeps extend to the right and backward sweeps
 * to the left; inside a grid step the path is the straight segment.
 */
class HolderSweep {
 public:
  HolderSweep(const RoughPathGrid& rp, double alpha, double anchor, bool forward)
      : rp_(rp), alpha_(alpha), forward_(forward), d_(rp.dim()) {
    rp.locate(anchor, seg_, theta_);
    const auto& g = rp.grid();
    // Snap an anchor sitting on a grid point to the step that will be swept next.
    auto on_grid = g.index_of(anchor);
    if (on_grid) {
      if (forward_) {
        if (*on_grid >= rp.steps()) throw WindowError("stopping sweep: no room to the right", anchor, anchor);
        seg_ = *on_grid;
        theta_ = 0.0;
      } else {
        if (*on_grid == 0) throw WindowError("stopping sweep: no room to the left", anchor, anchor);
        seg_ = *on_grid - 1;
        theta_ = 1.0;
      }
    }
    times_.push_back(anchor);
    grid_index_.push_back(on_grid ? static_cast<std::int64_t>(*on_grid) : -1);
    inc_.assign(d_, 0.0);
    area_.assign(d_ * d_, 0.0);
    frontier_ = anchor;
    const std::size_t max_lag =
        std::min<std::size_t>(rp.size(), static_cast<std::size_t>(std::ceil(1.0 / g.dt)) + 2);
    p1_ = lag_powers(max_lag, g.dt, alpha);
    p2_ = lag_powers(max_lag, g.dt, 2.0 * alpha);
  }

  double frontier() const { return frontier_; }
  double m1() const { return m1_; }
  double m2() const { return m2_; }

  /** Next grid point in the sweep direction, or nothing at the window edge. */
  bool next_grid(double& t) const {
    const auto& g = rp_.grid();
    if (forward_) {
      if (seg_ >= rp_.steps()) return false;
      t = g.time(seg_ + 1);
    } else {
      if (seg_ == static_cast<std::size_t>(-1)) return false;
      t = g.time(seg_);
    }
    return true;
  }

  /** Norm contributions of all pairs (p, t) for a candidate t inside the current step. */
  PairValue probe(double t) const {
    std::vector<double> v(d_), av(d_ * d_);
    piece(t, v, av);
    return scan(t, v, av);
  }

  /** Moves the frontier to the next grid point; returns the new maxima. */
  void advance() {
    double t = frontier_;
    if (!next_grid(t)) throw WindowError("stopping sweep ran past the window", t, t);
    std::vector<double> v(d_), av(d_ * d_);
    piece(t, v, av);
    const PairValue pv = scan(t, v, av);
    const std::size_t npts = times_.size();
    for (std::size_t p = 0; p < npts; ++p) extend(p, v, av);
    m1_ = std::max(m1_, pv.v1);
    m2_ = std::max(m2_, pv.v2);
    times_.push_back(t);
    const std::size_t gi = forward_ ? seg_ + 1 : seg_;
    grid_index_.push_back(static_cast<std::int64_t>(gi));
    inc_.resize(inc_.size() + d_, 0.0);
    area_.resize(area_.size() + d_ * d_, 0.0);
    frontier_ = t;
    if (forward_) {
      ++seg_;
      theta_ = 0.0;
    } else {
      --seg_;
      theta_ = 1.0;
    }
  }

 private:
  // Increment and area of the piece between the frontier and t (same step).
  void piece(double t, std::vector<double>& v, std::vector<double>& av) const {
    const auto& g = rp_.grid();
    const double* w = rp_.step_increment(seg_);
    const double tk = g.time(seg_);
    double th = (t - tk) / g.dt;
    th = std::clamp(th, 0.0, 1.0);
    const bool full = forward_ ? (theta_ == 0.0 && th == 1.0) : (theta_ == 1.0 && th == 0.0);
    if (full) {
      const double* s = rp_.step_area(seg_);
      for (std::size_t a = 0; a < d_; ++a) v[a] = w[a];
      for (std::size_t a = 0; a < d_ * d_; ++a) av[a] = s[a];
      return;
    }
    const double frac = std::abs(th - theta_);
    for (std::size_t a = 0; a < d_; ++a) v[a] = frac * w[a];
    for (std::size_t a = 0; a < d_; ++a)
      for (std::size_t b = 0; b < d_; ++b) av[a * d_ + b] = 0.5 * v[a] * v[b];
  }

  // Pair values (p, t) given the piece (v, av) from the frontier to t.
  PairValue scan(double t, const std::vector<double>& v, const std::vector<double>& av) const {
    PairValue best{0.0, 0.0};
    const std::size_t npts = times_.size();
    std::vector<double> x(d_), A(d_ * d_);
    const std::int64_t tg = grid_time_index(t);
    for (std::size_t p = 0; p < npts; ++p) {
      const double* ip = &inc_[p * d_];
      const double* ap = &area_[p * d_ * d_];
      for (std::size_t a = 0; a < d_; ++a) x[a] = ip[a] + v[a];
      if (forward_) {
        for (std::size_t a = 0; a < d_; ++a)
          for (std::size_t b = 0; b < d_; ++b)
            A[a * d_ + b] = ap[a * d_ + b] + av[a * d_ + b] + ip[a] * v[b];
      } else {
        for (std::size_t a = 0; a < d_; ++a)
          for (std::size_t b = 0; b < d_; ++b)
            A[a * d_ + b] = av[a * d_ + b] + ap[a * d_ + b] + v[a] * ip[b];
      }
      double l1, l2;
      if (tg >= 0 && grid_index_[p] >= 0) {
        const std::size_t lag = static_cast<std::size_t>(std::llabs(tg - grid_index_[p]));
        l1 = p1_[lag];
        l2 = p2_[lag];
      } else {
        l1 = std::pow(std::abs(t - times_[p]), alpha_);
        l2 = l1 * l1;
      }
      if (l1 <= 0.0) continue;
      best.v1 = std::max(best.v1, norm2(x.data(), d_) / l1);
      best.v2 = std::max(best.v2, norm2(A.data(), d_ * d_) / l2);
    }
    return best;
  }

  std::int64_t grid_time_index(double t) const {
    auto k = rp_.grid().index_of(t);
    return k ? static_cast<std::int64_t>(*k) : -1;
  }

  void extend(std::size_t p, const std::vector<double>& v, const std::vector<double>& av) {
    double* ip = &inc_[p * d_];
    double* ap = &area_[p * d_ * d_];
    if (forward_) {
      for (std::size_t a = 0; a < d_; ++a)
        for (std::size_t b = 0; b < d_; ++b) ap[a * d_ + b] += av[a * d_ + b] + ip[a] * v[b];
    } else {
      for (std::size_t a = 0; a < d_; ++a)
        for (std::size_t b = 0; b < d_; ++b) ap[a * d_ + b] += av[a * d_ + b] + v[a] * ip[b];
    }
    for (std::size_t a = 0; a < d_; ++a) ip[a] += v[a];
  }

  const RoughPathGrid& rp_;
  double alpha_;
  bool forward_;
  std::size_t d_;
  std::size_t seg_ = 0;
  double theta_ = 0.0;
  double frontier_ = 0.0;
  double m1_ = 0.0, m2_ = 0.0;
  std::vector<double> times_;
  std::vector<std::int64_t> grid_index_;
  std::vector<double> inc_, area_;
  std::vector<double> p1_, p2_;
};

inline StoppingTime stopping_time(const RoughPathGrid& rp, const StoppingParams& p, double start,
                                  bool forward) {
  p.validate();
  const double end = forward ? start + 1.0 : start - 1.0;
  const double lo_t = std::min(start, end), hi_t = std::max(start, end);
  if (!rp.grid().covers(lo_t, hi_t)) {
    throw WindowError(std::string(forward ? "forward" : "backward") +
                          " stopping time needs the rough path on [" + std::to_string(lo_t) +
                          ", " + std::to_string(hi_t) + "]",
                      lo_t, hi_t);
  }
  const double beta = 1.0 - p.alpha;
  auto h = [&](double m1, double m2, double t) {
    return m1 + m2 + p.mu * std::pow(std::abs(t - start), beta) - p.mu;
  };
  HolderSweep sweep(rp, p.alpha, start, forward);
  for (;;) {
    double g;
    if (!sweep.next_grid(g)) throw WindowError("stopping time: window exhausted", lo_t, hi_t);
    const bool past_end = forward ? g >= end : g <= end;
    const double upper = past_end ? end : g;
    PairValue pv = sweep.probe(upper);
    double m1 = std::max(sweep.m1(), pv.v1), m2 = std::max(sweep.m2(), pv.v2);
    if (h(m1, m2, upper) >= 0.0 || past_end) {
      if (m1 == 0.0 && m2 == 0.0) return {forward ? 1.0 : -1.0, 0.0};
      double lo = sweep.frontier(), hi = upper;
      double hv = h(m1, m2, hi);
      for (int it = 0; it < 200 && hv >= p.tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        PairValue q = sweep.probe(mid);
        const double hm = h(std::max(sweep.m1(), q.v1), std::max(sweep.m2(), q.v2), mid);
        if (hm >= 0.0) {
          hi = mid;
          hv = hm;
        } else {
          lo = mid;
        }
      }
      return {hi - start, std::abs(hv)};
    }
    sweep.advance();
  }
}

}  // namespace detail

/** T(theta_start W) = inf{tau > 0 : ||W||_{alpha,[start,start+tau]} + mu tau^(1-alpha) >= mu}. */
inline StoppingTime forward_stopping_time(const RoughPathGrid& rp, const StoppingParams& p,
                                          double start = 0.0) {
  return detail::stopping_time(rp, p, start, true);
}

/** Mirror of the forward time: the returned tau is negative. */
inline StoppingTime backward_stopping_time(const RoughPathGrid& rp, const StoppingParams& p,
                                           double start = 0.0) {
  return detail::stopping_time(rp, p, start, false);
}

/** Value of r -> W(r) (relative to the data origin) and WW over real [s, t], by Chen with partial steps. */
inline void pair_at_times(const RoughPathGrid& rp, double s, double t, double* inc, double* area) {
  const std::size_t d = rp.dim();
  std::size_t ks, kt;
  double ths, tht;
  rp.locate(s, ks, ths);
  rp.locate(t, kt, tht);
  std::vector<double> xs(d), xt(d);
  rp.point(s, xs.data());
  rp.point(t, xt.data());
  for (std::size_t a = 0; a < d; ++a) inc[a] = xt[a] - xs[a];
  // grid points strictly inside (s, t)
  const auto& g = rp.grid();
  std::size_t g_lo = (ths == 0.0) ? ks : ks + 1;
  std::size_t g_hi = (tht == 1.0) ? kt + 1 : kt;
  if (g_lo > g_hi || g.time(g_lo) > t) {
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) area[a * d + b] = 0.5 * inc[a] * inc[b];
    return;
  }
  std::vector<double> x1(d), xm(d), Am(d * d), x3(d), xg_lo(d), xg_hi(d);
  rp.point(g.time(g_lo), xg_lo.data());
  rp.point(g.time(g_hi), xg_hi.data());
  for (std::size_t a = 0; a < d; ++a) {
    x1[a] = xg_lo[a] - xs[a];
    x3[a] = xt[a] - xg_hi[a];
  }
  if (g_hi > g_lo) {
    rp.pair(g_lo, g_hi, xm.data(), Am.data());
  } else {
    std::fill(xm.begin(), xm.end(), 0.0);
    std::fill(Am.begin(), Am.end(), 0.0);
  }
  // WW_{s,t} = A1 + Am + A3 + x1 (x) xm + (x1 + xm) (x) x3
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      area[a * d + b] = 0.5 * x1[a] * x1[b] + Am[a * d + b] + 0.5 * x3[a] * x3[b] +
                        x1[a] * xm[b] + (x1[a] + xm[a]) * x3[b];
}

/**
 * Direct evaluation of ||W||_{alpha,[a,b]} over the point set {a} U grid U {b}
 * (all pairs), for real endpoints.
 */
inline HolderNorm interval_norm(const RoughPathGrid& rp, double alpha, double a, double b) {
  if (!(b > a)) throw DomainError("interval_norm: need a < b");
  const auto& g = rp.grid();
  std::vector<double> pts{a};
  for (std::size_t k = 0; k < g.n; ++k) {
    const double t = g.time(k);
    if (t > a && t < b) pts.push_back(t);
  }
  pts.push_back(b);
  const std::size_t d = rp.dim();
  std::vector<double> x(d), A(d * d);
  HolderNorm out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      pair_at_times(rp, pts[i], pts[j], x.data(), A.data());
      const double l1 = std::pow(pts[j] - pts[i], alpha);
      out.level1 = std::max(out.level1, detail::norm2(x.data(), d) / l1);
      out.level2 = std::max(out.level2, detail::norm2(A.data(), d * d) / (l1 * l1));
    }
  return out;
}

/** norm + mu |tau|^(1-alpha) - mu on the interval between start and start + tau. */
inline double stopping_residual(const RoughPathGrid& rp, const StoppingParams& p, double start,
                                double tau) {
  const double a = std::min(start, start + tau), b = std::max(start, start + tau);
  return interval_norm(rp, p.alpha, a, b).total() + p.mu * std::pow(std::abs(tau), 1.0 - p.alpha) -
         p.mu;
}

/** Raised when the window cannot support the requested stopping indices. */
class SequenceWindowError : public WindowError {
 public:
  SequenceWindowError(const std::string& what, double lo, double hi, std::int64_t achieved_min,
                      std::int64_t achieved_max)
      : WindowError(what, lo, hi), achieved_min_(achieved_min), achieved_max_(achieved_max) {}
  std::int64_t achieved_min() const { return achieved_min_; }
  std::int64_t achieved_max() const { return achieved_max_; }

 private:
  std::int64_t achieved_min_, achieved_max_;
};

/**
 * Stopping times T_i for i_min <= i <= i_max with T_0 = start; forward
 * T_i = T_{i-1} + T(theta_{T_{i-1}} W), backward T_i = T_{i+1} + That(theta_{T_{i+1}} W).
 * Times are absolute; relative times are time(i) - start.
 */
class StoppingSequence {
 public:
  StoppingSequence() = default;
  StoppingSequence(std::int64_t i_min, std::vector<double> times, double start)
      : i_min_(i_min), times_(std::move(times)), start_(start) {}

  std::int64_t i_min() const { return i_min_; }
  std::int64_t i_max() const { return i_min_ + static_cast<std::int64_t>(times_.size()) - 1; }
  double start() const { return start_; }
  double time(std::int64_t i) const {
    if (i < i_min() || i > i_max()) throw DomainError("stopping index out of range");
    return times_[static_cast<std::size_t>(i - i_min_)];
  }
  double relative(std::int64_t i) const { return time(i) - start_; }
  /** Grid point at or below T_i. */
  std::size_t grid_index(std::int64_t i, const TimeGrid& g) const { return g.floor_index(time(i)); }
  double snapped(std::int64_t i, const TimeGrid& g) const { return g.time(grid_index(i, g)); }

 private:
  std::int64_t i_min_ = 0;
  std::vector<double> times_;
  double start_ = 0.0;
};

inline StoppingSequence build_sequence(const RoughPathGrid& rp, const StoppingParams& p,
                                       std::int64_t i_min, std::int64_t i_max, double start = 0.0) {
  if (i_min > 0 || i_max < 0) throw DomainError("build_sequence: need i_min <= 0 <= i_max");
  std::vector<double> fwd{start}, bwd;
  double t = start;
  for (std::int64_t i = 1; i <= i_max; ++i) {
    try {
      t += forward_stopping_time(rp, p, t).tau;
    } catch (const WindowError& e) {
      throw SequenceWindowError(std::string("build_sequence: ") + e.what(), e.needed_lo(),
                                e.needed_hi(), 0, i - 1);
    }
    fwd.push_back(t);
  }
  t = start;
  for (std::int64_t i = -1; i >= i_min; --i) {
    try {
      t += backward_stopping_time(rp, p, t).tau;
    } catch (const WindowError& e) {
      throw SequenceWindowError(std::string("build_sequence: ") + e.what(), e.needed_lo(),
                                e.needed_hi(), i + 1, i_max);
    }
    bwd.push_back(t);
  }
  std::vector<double> times(bwd.rbegin(), bwd.rend());
  times.insert(times.end(), fwd.begin(), fwd.end());
  return StoppingSequence(i_min, std::move(times), start);
}

/** Backward stopping times from start until they leave [start - horizon, start]. */
inline std::vector<double> backward_times_until(const RoughPathGrid& rp, const StoppingParams& p,
                                                double start, double horizon) {
  std::vector<double> out;
  double t = start;
  while (t >= start - horizon) {
    t += backward_stopping_time(rp, p, t).tau;
    out.push_back(t);
  }
  return out;
}

struct CountBound {
  std::size_t count = 0;  // #{i < 0 : T_i >= -1}
  double bound = 0.0;     // ((||W||_{alpha',[-1,0]} + mu) / mu)^(1/(alpha' - alpha))
  double norm = 0.0;
};

inline CountBound count_bound_check(const RoughPathGrid& rp, const StoppingParams& p,
                                    double alpha_prime) {
  if (!(alpha_prime > p.alpha)) throw DomainError("count_bound_check: alpha < alpha_prime violated");
  CountBound out;
  auto times = backward_times_until(rp, p, 0.0, 1.0);
  for (double t : times)
    if (t >= -1.0) ++out.count;
  out.norm = holder_norm(rp, alpha_prime, -1.0, 0.0).total();
  out.bound = std::pow((out.norm + p.mu) / p.mu, 1.0 / (alpha_prime - p.alpha));
  return out;
}

/**
 * Monte Carlo estimate of d1^{-1} = E[((sup_{r in [0,1]} ||theta_r W||_{alpha',[-1,0]} + mu)/mu)^{1/(alpha'-alpha)}]
 * averaged over the given samples and over shifts s (using stationarity of increments);
 * returns d1 together with the individual terms.
 */
struct D1Estimate {
  double d1 = 0.0;
  std::vector<double> terms;
};

inline D1Estimate estimate_d1(const std::vector<RoughPathGrid>& samples, const StoppingParams& p,
                              double alpha_prime, const std::vector<double>& shifts) {
  if (!(alpha_prime > p.alpha)) throw DomainError("estimate_d1: alpha < alpha_prime violated");
  if (samples.empty() || shifts.empty()) throw DomainError("estimate_d1: need samples and shifts");
  D1Estimate out;
  const double expo = 1.0 / (alpha_prime - p.alpha);
  for (const auto& rp : samples) {
    const auto& g = rp.grid();
    const std::size_t m = g.checked_index(1.0, "estimate_d1") - g.checked_index(0.0, "estimate_d1");
    for (double s : shifts) {
      if (!g.covers(s - 1.0, s + 1.0))
        throw WindowError("estimate_d1: each shift s needs the window [s - 1, s + 1]", s - 1.0,
                          s + 1.0);
      const std::size_t p0 = g.checked_index(s - 1.0, "estimate_d1");
      auto norms = window_norms(rp, alpha_prime, m, p0, m + 1);
      const double sup = *std::max_element(norms.begin(), norms.end());
      out.terms.push_back(std::pow((sup + p.mu) / p.mu, expo));
    }
  }
  double mean = 0.0;
  for (double v : out.terms) mean += v;
  mean /= static_cast<double>(out.terms.size());
  out.d1 = 1.0 / mean;
  return out;
}

/** Empirical liminf of |T_i| / |i| over the older half of the backward indices. */
inline double backward_spacing(const StoppingSequence& seq) {
  const std::int64_t lo = seq.i_min();
  if (lo >= 0) throw DomainError("backward_spacing: sequence has no backward indices");
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t i = lo; i <= std::min<std::int64_t>(-1, lo / 2); ++i)
    best = std::min(best, std::abs(seq.relative(i)) / static_cast<double>(-i));
  return best;
}

}  // namespace rough_attractor

#endif
