#ifndef ROUGH_ATTRACTOR_ROUGHPATH_HPP
#define ROUGH_ATTRACTOR_ROUGHPATH_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "fbm.hpp"
#include "grid.hpp"

namespace rough_attractor {

/**
 * A discrete rough path (W, WW) on a uniform grid: one increment and one
 * second-order area per step, plus prefix sums from the left end of the
 * stored data so any pair (s, t) of grid points is reconstructed by Chen's
 * identity in O(d^2). The prefix sums are kept in long double: reconstructing a
 * short pair subtracts two large prefix areas.
 *
 * Vector norms are Euclidean and tensor norms are Frobenius.
 */
class RoughPathGrid {
 public:
  RoughPathGrid() = default;

  /** inc has (n-1)*d entries, area has (n-1)*d*d entries (row-major d x d per step). */
  RoughPathGrid(TimeGrid grid, std::size_t d, std::vector<double> inc, std::vector<double> area)
      : grid_(grid) {
    if (grid.n < 2 || d == 0) throw DomainError("RoughPathGrid: need n >= 2 and d >= 1");
    if (inc.size() != (grid.n - 1) * d || area.size() != (grid.n - 1) * d * d)
      throw DomainError("RoughPathGrid: step arrays have the wrong size");
    auto data = std::make_shared<Data>();
    data->d = d;
    data->inc = std::move(inc);
    data->area = std::move(area);
    build_prefix(*data, grid.n);
    data_ = std::move(data);
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return data_->d; }
  std::size_t size() const { return grid_.n; }
  std::size_t steps() const { return grid_.n - 1; }

  const double* step_increment(std::size_t k) const { return &data_->inc[(offset_ + k) * dim()]; }
  const double* step_area(std::size_t k) const {
    return &data_->area[(offset_ + k) * dim() * dim()];
  }
  const long double* prefix_x(std::size_t k) const { return &data_->px[(offset_ + k) * dim()]; }
  const long double* prefix_a(std::size_t k) const {
    return &data_->pa[(offset_ + k) * dim() * dim()];
  }

  /** W_{i,j} and WW_{i,j} for grid indices i <= j (prefix-sum form of Chen's identity). */
  void pair(std::size_t i, std::size_t j, double* inc, double* area) const {
    const std::size_t d = dim();
    const long double* xi = prefix_x(i);
    const long double* xj = prefix_x(j);
    const long double* ai = prefix_a(i);
    const long double* aj = prefix_a(j);
    for (std::size_t a = 0; a < d; ++a) inc[a] = static_cast<double>(xj[a] - xi[a]);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        area[a * d + b] = static_cast<double>(aj[a * d + b] - ai[a * d + b] - xi[a] * (xj[b] - xi[b]));
  }

  /** Path value relative to the left end of the stored data, at a real time in the window. */
  void point(double t, double* x) const {
    std::size_t k;
    double theta;
    locate(t, k, theta);
    const std::size_t d = dim();
    const long double* xk = prefix_x(k);
    const double* w = step_increment(k);
    for (std::size_t a = 0; a < d; ++a) x[a] = static_cast<double>(xk[a] + theta * w[a]);
  }

  /** Step index k and fraction theta in [0, 1] with t = time(k) + theta dt. */
  void locate(double t, std::size_t& k, double& theta) const {
    if (!grid_.covers(t, t)) {
      throw WindowError("rough path evaluated at " + std::to_string(t) + " outside [" +
                            std::to_string(grid_.t0()) + ", " + std::to_string(grid_.t_end()) + "]",
                        t, t);
    }
    double r = t / grid_.dt - static_cast<double>(grid_.first);
    double kf = std::floor(r);
    if (kf < 0.0) kf = 0.0;
    if (kf > static_cast<double>(steps() - 1)) kf = static_cast<double>(steps() - 1);
    k = static_cast<std::size_t>(kf);
    theta = std::clamp(r - kf, 0.0, 1.0);
  }

  /** theta_tau: same data with time relabelled by -tau; tau must be a grid time. */
  RoughPathGrid shifted(double tau) const {
    grid_.checked_index(tau, "rough path shift");
    const double r = tau / grid_.dt;
    RoughPathGrid p = *this;
    p.grid_.first = grid_.first - static_cast<std::int64_t>(std::nearbyint(r));
    return p;
  }

  /** Restriction to grid points in [a, b]. */
  RoughPathGrid window(double a, double b) const {
    const std::size_t ka = grid_.checked_index(a, "rough path window");
    const std::size_t kb = grid_.checked_index(b, "rough path window");
    if (kb <= ka) throw DomainError("rough path window: empty interval");
    RoughPathGrid p = *this;
    p.offset_ = offset_ + ka;
    p.grid_ = grid_.sub(ka, kb - ka + 1);
    return p;
  }

 private:
  struct Data {
    std::size_t d = 0;
    std::vector<double> inc, area;
    std::vector<long double> px, pa;
  };

  static void build_prefix(Data& data, std::size_t n) {
    const std::size_t d = data.d;
    data.px.assign(n * d, 0.0L);
    data.pa.assign(n * d * d, 0.0L);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const long double* x = &data.px[k * d];
      const double* w = &data.inc[k * d];
      const long double* A = &data.pa[k * d * d];
      const double* s = &data.area[k * d * d];
      long double* xn = &data.px[(k + 1) * d];
      long double* An = &data.pa[(k + 1) * d * d];
      for (std::size_t a = 0; a < d; ++a) xn[a] = x[a] + w[a];
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          An[a * d + b] = A[a * d + b] + s[a * d + b] + x[a] * w[b];
    }
  }

  std::shared_ptr<const Data> data_;
  std::size_t offset_ = 0;
  TimeGrid grid_;
};

/** Canonical lift of the piecewise-linear interpolation: each step carries 1/2 w (x) w. */
inline RoughPathGrid canonical_lift(const GridPath& path) {
  const std::size_t d = path.dim();
  const std::size_t m = path.size() - 1;
  std::vector<double> inc(m * d), area(m * d * d);
  for (std::size_t k = 0; k < m; ++k) {
    double* w = &inc[k * d];
    for (std::size_t a = 0; a < d; ++a) w[a] = path.step(k, a);
    double* s = &area[k * d * d];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) s[a * d + b] = 0.5 * w[a] * w[b];
  }
  return RoughPathGrid(path.grid(), d, std::move(inc), std::move(area));
}

/** The lifted zero path on a grid. */
inline RoughPathGrid zero_rough_path(TimeGrid grid, std::size_t d) {
  return RoughPathGrid(grid, d, std::vector<double>((grid.n - 1) * d, 0.0),
                       std::vector<double>((grid.n - 1) * d * d, 0.0));
}

struct ChenPair {
  Eigen::VectorXd increment;
  Eigen::MatrixXd area;
};

/** (W_{s,t}, WW_{s,t}) for grid times s <= t. */
inline ChenPair chen_reconstruct(const RoughPathGrid& rp, double s, double t) {
  if (t < s) throw DomainError("chen_reconstruct: need s <= t");
  if (!rp.grid().covers(s, t))
    throw WindowError("chen_reconstruct: interval outside the stored window", s, t);
  const std::size_t i = rp.grid().checked_index(s, "chen_reconstruct");
  const std::size_t j = rp.grid().checked_index(t, "chen_reconstruct");
  const std::size_t d = rp.dim();
  std::vector<double> inc(d), area(d * d);
  rp.pair(i, j, inc.data(), area.data());
  ChenPair out{Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
  for (std::size_t a = 0; a < d; ++a) {
    out.increment[a] = inc[a];
    for (std::size_t b = 0; b < d; ++b) out.area(a, b) = area[a * d + b];
  }
  return out;
}

/**
 * Largest scaled Chen residual over grid triples s < u < t:
 * |WW_{s,t} - WW_{s,u} - WW_{u,t} - W_{s,u} (x) W_{u,t}| / (max|W|^2 + max|WW|).
 * Pairs are rebuilt by summing steps, independently of the prefix sums.
 */
inline double chen_defect(const RoughPathGrid& rp, std::size_t stride = 1) {
  const std::size_t d = rp.dim();
  const std::size_t n = rp.size();
  auto sum_steps = [&](std::size_t i, std::size_t j, std::vector<double>& x, std::vector<double>& A) {
    x.assign(d, 0.0);
    A.assign(d * d, 0.0);
    for (std::size_t k = i; k < j; ++k) {
      const double* w = rp.step_increment(k);
      const double* s = rp.step_area(k);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) A[a * d + b] += s[a * d + b] + x[a] * w[b];
      for (std::size_t a = 0; a < d; ++a) x[a] += w[a];
    }
  };
  double scale_x = 0.0, scale_a = 0.0, worst = 0.0;
  std::vector<double> x1, a1, x2, a2, x3, a3;
  std::vector<std::size_t> pts;
  for (std::size_t k = 0; k < n; k += stride) pts.push_back(k);
  if (pts.back() != n - 1) pts.push_back(n - 1);
  for (std::size_t ii = 0; ii < pts.size(); ++ii) {
    for (std::size_t jj = ii + 1; jj < pts.size(); ++jj) {
      sum_steps(pts[ii], pts[jj], x1, a1);
      double nx = 0.0, na = 0.0;
      for (double v : x1) nx += v * v;
      for (double v : a1) na += v * v;
      scale_x = std::max(scale_x, nx);
      scale_a = std::max(scale_a, std::sqrt(na));
    }
  }
  const double scale = std::max(scale_x + scale_a, 1e-300);
  std::vector<double> inc(d), area(d * d);
  for (std::size_t ii = 0; ii < pts.size(); ++ii)
    for (std::size_t uu = ii + 1; uu < pts.size(); ++uu)
      for (std::size_t jj = uu + 1; jj < pts.size(); ++jj) {
        rp.pair(pts[ii], pts[jj], inc.data(), area.data());
        sum_steps(pts[ii], pts[uu], x2, a2);
        sum_steps(pts[uu], pts[jj], x3, a3);
        double r = 0.0;
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) {
            const double e = area[a * d + b] - a2[a * d + b] - a3[a * d + b] - x2[a] * x3[b];
            r += e * e;
          }
        worst = std::max(worst, std::sqrt(r) / scale);
      }
  return worst;
}

/** Time reversal: Wbar_{s,t} = W_{-t,-s}, WWbar_{s,t} = (WW_{-t,-s})^T. */
inline RoughPathGrid reverse(const RoughPathGrid& rp) {
  const std::size_t d = rp.dim();
  const std::size_t m = rp.steps();
  std::vector<double> inc(m * d), area(m * d * d);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t src = m - 1 - k;
    const double* w = rp.step_increment(src);
    const double* s = rp.step_area(src);
    for (std::size_t a = 0; a < d; ++a) inc[k * d + a] = -w[a];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) area[k * d * d + a * d + b] = s[b * d + a];
  }
  TimeGrid g{rp.grid().dt, -rp.grid().last(), rp.grid().n};
  return RoughPathGrid(g, d, std::move(inc), std::move(area));
}

struct HolderNorm {
  double level1 = 0.0;
  double level2 = 0.0;
  double total() const { return level1 + level2; }
};

enum class HolderMethod { exact, dyadic };

namespace detail {

inline std::vector<double> lag_powers(std::size_t m, double dt, double expo) {
  std::vector<double> out(m + 1, 0.0);
  for (std::size_t k = 1; k <= m; ++k) out[k] = std::pow(static_cast<double>(k) * dt, expo);
  return out;
}

inline std::pair<std::size_t, std::size_t> interval_indices(const TimeGrid& g, double a, double b,
                                                            const char* what) {
  if (!(b > a)) throw DomainError(std::string(what) + ": need a < b");
  if (!g.covers(a, b)) throw WindowError(std::string(what) + ": interval outside the window", a, b);
  return {g.checked_index(a, what), g.checked_index(b, what)};
}

inline double norm2(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

}  // namespace detail

/** Inhomogeneous alpha-Hoelder norm over all grid pairs in [a, b] (grid times). */
inline HolderNorm holder_norm(const RoughPathGrid& rp, double alpha, double a, double b,
                              HolderMethod method = HolderMethod::exact) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("holder_norm: alpha must lie in (0, 1)");
  auto [ia, ib] = detail::interval_indices(rp.grid(), a, b, "holder_norm");
  const std::size_t d = rp.dim();
  const std::size_t m = ib - ia;
  const double dt = rp.grid().dt;
  HolderNorm out;
  if (method == HolderMethod::exact) {
    auto p1 = detail::lag_powers(m, dt, alpha);
    auto p2 = detail::lag_powers(m, dt, 2.0 * alpha);
    std::vector<double> x(d), A(d * d);
    for (std::size_t i = ia; i < ib; ++i) {
      std::fill(x.begin(), x.end(), 0.0);
      std::fill(A.begin(), A.end(), 0.0);
      for (std::size_t j = i; j < ib; ++j) {
        const double* w = rp.step_increment(j);
        const double* s = rp.step_area(j);
        for (std::size_t p = 0; p < d; ++p)
          for (std::size_t q = 0; q < d; ++q) A[p * d + q] += s[p * d + q] + x[p] * w[q];
        for (std::size_t p = 0; p < d; ++p) x[p] += w[p];
        const std::size_t lag = j + 1 - i;
        out.level1 = std::max(out.level1, detail::norm2(x.data(), d) / p1[lag]);
        out.level2 = std::max(out.level2, detail::norm2(A.data(), d * d) / p2[lag]);
      }
    }
    return out;
  }
  // Dyadic proxy: per-scale maxima over two interleaved families of dyadic intervals.
  std::vector<double> x(d), A(d * d);
  for (std::size_t len = 1; len <= m; len *= 2) {
    const double l1 = std::pow(static_cast<double>(len) * dt, alpha);
    const double l2 = l1 * l1;
    const std::size_t half = std::max<std::size_t>(len / 2, 1);
    for (std::size_t off = 0; off < len; off += half) {
      for (std::size_t i = ia + off; i + len <= ib; i += len) {
        rp.pair(i, i + len, x.data(), A.data());
        out.level1 = std::max(out.level1, detail::norm2(x.data(), d) / l1);
        out.level2 = std::max(out.level2, detail::norm2(A.data(), d * d) / l2);
      }
      if (len == 1) break;
    }
  }
  return out;
}

/** Inhomogeneous alpha-Hoelder rough distance over grid pairs in [a, b]; grids must align. */
inline double rough_distance(const RoughPathGrid& r1, const RoughPathGrid& r2, double alpha,
                             double a, double b) {
  if (!r1.grid().same_spacing(r2.grid()))
    throw DomainError("rough_distance: rough paths use different grid spacings");
  if (r1.dim() != r2.dim()) throw DomainError("rough_distance: dimension mismatch");
  auto [ia, ib] = detail::interval_indices(r1.grid(), a, b, "rough_distance");
  const std::size_t ja = detail::interval_indices(r2.grid(), a, b, "rough_distance").first;
  const std::size_t d = r1.dim();
  const std::size_t m = ib - ia;
  const double dt = r1.grid().dt;
  auto p1 = detail::lag_powers(m, dt, alpha);
  auto p2 = detail::lag_powers(m, dt, 2.0 * alpha);
  std::vector<double> x(d), A(d * d), y(d), B(d * d), dx(d), dA(d * d);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(A.begin(), A.end(), 0.0);
    std::fill(y.begin(), y.end(), 0.0);
    std::fill(B.begin(), B.end(), 0.0);
    for (std::size_t j = i; j < m; ++j) {
      const double* w = r1.step_increment(ia + j);
      const double* s = r1.step_area(ia + j);
      const double* v = r2.step_increment(ja + j);
      const double* u = r2.step_area(ja + j);
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q) {
          A[p * d + q] += s[p * d + q] + x[p] * w[q];
          B[p * d + q] += u[p * d + q] + y[p] * v[q];
        }
      for (std::size_t p = 0; p < d; ++p) {
        x[p] += w[p];
        y[p] += v[p];
        dx[p] = x[p] - y[p];
      }
      for (std::size_t p = 0; p < d * d; ++p) dA[p] = A[p] - B[p];
      const std::size_t lag = j + 1 - i;
      s1 = std::max(s1, detail::norm2(dx.data(), d) / p1[lag]);
      s2 = std::max(s2, detail::norm2(dA.data(), d * d) / p2[lag]);
    }
  }
  return s1 + s2;
}

/**
 * Hoelder norms of all windows [p, p + m] (in grid steps) for p = p0 .. p0 + count - 1,
 * by dynamic programming over the lag: O((count + m) m d^2).
 */
inline std::vector<double> window_norms(const RoughPathGrid& rp, double alpha, std::size_t m,
                                        std::size_t p0, std::size_t count) {
  if (m == 0 || count == 0) throw DomainError("window_norms: need m >= 1 and count >= 1");
  const std::size_t end = p0 + count - 1 + m;
  if (end >= rp.size()) {
    throw WindowError("window_norms: windows extend beyond the stored rough path",
                      rp.grid().time(std::min(p0, rp.size() - 1)), rp.grid().time(0) +
                          static_cast<double>(end) * rp.grid().dt);
  }
  const std::size_t d = rp.dim();
  const double dt = rp.grid().dt;
  const std::size_t len = end - p0 + 1;
  std::vector<double> D1(len, 0.0), D2(len, 0.0);
  // X[p], A[p] hold the pair (p, p + lag), extended by one step per lag via Chen
  std::vector<double> X(len * d, 0.0), A(len * d * d, 0.0);
  for (std::size_t lag = 1; lag <= m; ++lag) {
    const double l1 = std::pow(static_cast<double>(lag) * dt, alpha);
    const double l2 = l1 * l1;
    for (std::size_t p = 0; p + lag < len; ++p) {
      double* x = &X[p * d];
      double* a = &A[p * d * d];
      const double* w = rp.step_increment(p0 + p + lag - 1);
      const double* st = rp.step_area(p0 + p + lag - 1);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) a[i * d + j] += st[i * d + j] + x[i] * w[j];
      for (std::size_t i = 0; i < d; ++i) x[i] += w[i];
      const double v1 = detail::norm2(x, d) / l1;
      const double v2 = detail::norm2(a, d * d) / l2;
      D1[p] = std::max({D1[p], D1[p + 1], v1});
      D2[p] = std::max({D2[p], D2[p + 1], v2});
    }
  }
  std::vector<double> out(count);
  for (std::size_t p = 0; p < count; ++p) out[p] = D1[p] + D2[p];
  return out;
}

/**
 * Wong-Zakai smoothing W^eta(t) = (1/eta) int_0^t (W(s + eta) - W(s)) ds for the
 * piecewise-linear interpolation of the path, i.e. the moving average over [t, t + eta]
 * minus its value at 0. eta must be a positive multiple of dt; the result loses the
 * last eta / dt grid points of the window.
 */
inline GridPath wong_zakai_smooth(const GridPath& path, double eta) {
  const double dt = path.grid().dt;
  const double r = eta / dt;
  const double ef = std::nearbyint(r);
  if (!(eta > 0.0) || std::abs(r - ef) > 1e-7 || ef < 1.0)
    throw DomainError("wong_zakai_smooth: eta must be a positive multiple of dt");
  const std::size_t e = static_cast<std::size_t>(ef);
  const std::size_t n = path.size();
  const std::size_t z = path.zero_index();
  if (z + e >= n) {
    throw WindowError("wong_zakai_smooth: window must extend at least eta beyond time 0", 0.0,
                      eta);
  }
  const std::size_t d = path.dim();
  const std::size_t n_out = n - e;
  std::vector<double> out(n_out * d);
  std::vector<long double> prefix(n);
  for (std::size_t c = 0; c < d; ++c) {
    prefix[0] = 0.0L;
    for (std::size_t k = 0; k + 1 < n; ++k)
      prefix[k + 1] = prefix[k] + 0.5L * (static_cast<long double>(path.value(k, c)) +
                                          static_cast<long double>(path.value(k + 1, c)));
    const long double base = prefix[z + e] - prefix[z];
    for (std::size_t k = 0; k < n_out; ++k)
      out[k * d + c] = static_cast<double>((prefix[k + e] - prefix[k] - base) /
                                           static_cast<long double>(e));
  }
  return GridPath(path.grid().t0(), dt, d, std::move(out));
}

/** Writes base.inc.csv (t, w1..wd per step) and base.area.csv (t, a11..add per step). */
inline void write_rough_path_csv(const RoughPathGrid& rp, const std::string& base) {
  const std::size_t d = rp.dim();
  std::ofstream inc(base + ".inc.csv"), area(base + ".area.csv");
  if (!inc || !area) throw Error("cannot write " + base + ".*.csv");
  inc << "t";
  for (std::size_t a = 0; a < d; ++a) inc << ",w" << (a + 1);
  inc << "\n";
  area << "t";
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) area << ",a" << (a + 1) << (b + 1);
  area << "\n";
  char buf[64];
  for (std::size_t k = 0; k < rp.steps(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", rp.grid().time(k));
    inc << buf;
    area << buf;
    for (std::size_t a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", rp.step_increment(k)[a]);
      inc << ',' << buf;
    }
    for (std::size_t a = 0; a < d * d; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", rp.step_area(k)[a]);
      area << ',' << buf;
    }
    inc << "\n";
    area << "\n";
  }
}

}  // namespace rough_attractor

#endif
