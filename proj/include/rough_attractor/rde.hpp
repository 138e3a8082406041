#ifndef ROUGH_ATTRACTOR_RDE_HPP
#define ROUGH_ATTRACTOR_RDE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "grid.hpp"
#include "roughpath.hpp"
#include "spectral.hpp"

namespace rough_attractor {

/**
 * A path y with Gubinelli derivative y' (one field per noise channel) on a grid;
 * column k of y() is the state at grid().time(k).
 */
class ControlledPath {
 public:
  ControlledPath() = default;
  ControlledPath(TimeGrid grid, Eigen::MatrixXd y, std::vector<Eigen::MatrixXd> yp)
      : grid_(grid), y_(std::move(y)), yp_(std::move(yp)) {
    if (static_cast<std::size_t>(y_.cols()) != grid_.n)
      throw DomainError("ControlledPath: column count must match the grid");
    for (const auto& m : yp_)
      if (m.rows() != y_.rows() || m.cols() != y_.cols())
        throw DomainError("ControlledPath: derivative shape must match y");
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t modes() const { return static_cast<std::size_t>(y_.rows()); }
  std::size_t channels() const { return yp_.size(); }
  const Eigen::MatrixXd& y() const { return y_; }
  const Eigen::MatrixXd& yp(std::size_t j) const { return yp_[j]; }
  SpectralField state(std::size_t k) const { return y_.col(static_cast<Eigen::Index>(k)); }
  SpectralField final_state() const { return y_.col(y_.cols() - 1); }

  ControlledPath scaled(double c) const {
    std::vector<Eigen::MatrixXd> yp = yp_;
    for (auto& m : yp) m *= c;
    return ControlledPath(grid_, c * y_, std::move(yp));
  }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd y_;
  std::vector<Eigen::MatrixXd> yp_;
};

/** Index of the path grid's first point inside the driver grid. */
inline std::size_t driver_offset(const RoughPathGrid& rp, const TimeGrid& g) {
  if (!rp.grid().same_spacing(g)) throw DomainError("misaligned grids: different dt");
  const std::int64_t off = g.first - rp.grid().first;
  if (off < 0 || off + static_cast<std::int64_t>(g.n) > static_cast<std::int64_t>(rp.size()))
    throw WindowError("path grid is not contained in the driver window", g.t0(), g.t_end());
  return static_cast<std::size_t>(off);
}

/** R^y_{s,t} = y_{s,t} - y'_s W_{s,t} for path grid indices s <= t. */
inline SpectralField remainder(const ControlledPath& z, const RoughPathGrid& rp, std::size_t s,
                               std::size_t t) {
  const std::size_t off = driver_offset(rp, z.grid());
  const std::size_t d = rp.dim();
  if (z.channels() != d) throw DomainError("remainder: channel count must match the driver");
  std::vector<double> w(d), a(d * d);
  rp.pair(off + s, off + t, w.data(), a.data());
  SpectralField r = z.state(t) - z.state(s);
  for (std::size_t j = 0; j < d; ++j) r -= w[j] * z.yp(j).col(static_cast<Eigen::Index>(s));
  return r;
}

/**
 * Integrand (z, z') for rough convolution: z^j is paired with W^j and z'^{ij}
 * (stored at index i*d + j) with WW^{ij}.
 */
struct Integrand {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> z;
  std::vector<Eigen::MatrixXd> zp;
};

/** (G(y), DG(y)G(y)) along a solution. */
inline Integrand integrand_from_solution(const SpectralModel& m, const CoefficientSpec& cs,
                                         const ControlledPath& y) {
  const std::size_t d = cs.channels();
  NoiseOperator noise(m, cs);
  Integrand out{y.grid(), {}, {}};
  const auto rows = static_cast<Eigen::Index>(y.modes());
  const auto cols = static_cast<Eigen::Index>(y.grid().n);
  out.z.assign(d, Eigen::MatrixXd(rows, cols));
  out.zp.assign(d * d, Eigen::MatrixXd(rows, cols));
  for (Eigen::Index k = 0; k < cols; ++k) {
    const SpectralField yk = y.y().col(k);
    for (std::size_t j = 0; j < d; ++j) out.z[j].col(k) = noise.channel(yk, j);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) out.zp[i * d + j].col(k) = noise.second(yk, i, j);
  }
  return out;
}

/** One-channel controlled path used directly as an integrand (z = y, z' = y'). */
inline Integrand as_integrand(const ControlledPath& y) {
  if (y.channels() != 1) throw DomainError("as_integrand: needs exactly one channel");
  return Integrand{y.grid(), {y.y()}, {y.yp(0)}};
}

namespace detail {

struct PartitionInfo {
  std::size_t i0;     // index of a in the integrand grid
  std::size_t steps;  // number of coarse steps
  std::size_t stride;
  std::size_t off;    // integrand grid offset inside the driver grid
};

inline PartitionInfo partition(const RoughPathGrid& rp, const TimeGrid& g, double a, double b,
                               double eval_t, std::size_t stride, const char* what) {
  if (stride == 0) throw DomainError(std::string(what) + ": stride must be positive");
  if (!(b > a)) throw DomainError(std::string(what) + ": need a < b");
  if (eval_t < b - 1e-9 * g.dt) throw DomainError(std::string(what) + ": eval_t must be >= b");
  const std::size_t off = driver_offset(rp, g);
  const std::size_t ia = g.checked_index(a, what);
  const std::size_t ib = g.checked_index(b, what);
  if ((ib - ia) % stride != 0)
    throw DomainError(std::string(what) + ": interval length is not a multiple of the stride");
  return {ia, (ib - ia) / stride, stride, off};
}

inline void coarse_pair(const RoughPathGrid& rp, std::size_t i, std::size_t stride, double* w,
                        double* a) {
  const std::size_t d = rp.dim();
  if (stride == 1) {
    std::copy(rp.step_increment(i), rp.step_increment(i) + d, w);
    std::copy(rp.step_area(i), rp.step_area(i) + d * d, a);
    return;
  }
  rp.pair(i, i + stride, w, a);
}

inline void add_term(const Integrand& z, std::size_t k, std::size_t d, const double* w,
                     const double* a, double sign, SpectralField& acc) {
  const auto kk = static_cast<Eigen::Index>(k);
  for (std::size_t j = 0; j < d; ++j) acc += (sign * w[j]) * z.z[j].col(kk);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) acc += (sign * a[i * d + j]) * z.zp[i * d + j].col(kk);
}

}  // namespace detail

/**
 * Compensated sum sum_u S(eval_t - u)[z_u W_{u,v} + z'_u WW_{u,v}] over the partition
 * of [a, b] with mesh stride * dt.
 */
inline SpectralField rough_convolution(const SpectralModel& m, const Integrand& z,
                                       const RoughPathGrid& rp, double a, double b, double eval_t,
                                       std::size_t stride = 1) {
  const std::size_t d = rp.dim();
  if (z.z.size() != d || z.zp.size() != d * d)
    throw DomainError("rough_convolution: integrand channels must match the driver");
  auto info = detail::partition(rp, z.grid, a, b, eval_t, stride, "rough_convolution");
  const double h = static_cast<double>(stride) * z.grid.dt;
  const Eigen::ArrayXd sh = (-h * m.spectrum().rates().array()).exp();
  SpectralField acc = SpectralField::Zero(static_cast<Eigen::Index>(m.size()));
  std::vector<double> w(d), A(d * d);
  for (std::size_t s = 0; s < info.steps; ++s) {
    const std::size_t k = info.i0 + s * stride;
    detail::coarse_pair(rp, info.off + k, stride, w.data(), A.data());
    detail::add_term(z, k, d, w.data(), A.data(), 1.0, acc);
    acc = (sh * acc.array()).matrix();
  }
  return semigroup_apply(m.spectrum(), acc, std::max(0.0, eval_t - b));
}

/** Joint compensated sum of the difference of two rough convolutions on matched partitions. */
inline SpectralField cross_noise_integral(const SpectralModel& m, const Integrand& z1,
                                          const RoughPathGrid& rp1, const Integrand& z2,
                                          const RoughPathGrid& rp2, double a, double b,
                                          double eval_t, std::size_t stride = 1) {
  const std::size_t d = rp1.dim();
  if (rp2.dim() != d) throw DomainError("cross_noise_integral: dimension mismatch");
  if (!same_points(z1.grid, z2.grid)) throw DomainError("cross_noise_integral: misaligned grids");
  auto i1 = detail::partition(rp1, z1.grid, a, b, eval_t, stride, "cross_noise_integral");
  auto i2 = detail::partition(rp2, z2.grid, a, b, eval_t, stride, "cross_noise_integral");
  const double h = static_cast<double>(stride) * z1.grid.dt;
  const Eigen::ArrayXd sh = (-h * m.spectrum().rates().array()).exp();
  SpectralField acc = SpectralField::Zero(static_cast<Eigen::Index>(m.size()));
  std::vector<double> w1(d), A1(d * d), w2(d), A2(d * d);
  for (std::size_t s = 0; s < i1.steps; ++s) {
    const std::size_t k = i1.i0 + s * stride;
    detail::coarse_pair(rp1, i1.off + k, stride, w1.data(), A1.data());
    detail::coarse_pair(rp2, i2.off + k, stride, w2.data(), A2.data());
    detail::add_term(z1, k, d, w1.data(), A1.data(), 1.0, acc);
    detail::add_term(z2, k, d, w2.data(), A2.data(), -1.0, acc);
    acc = (sh * acc.array()).matrix();
  }
  return semigroup_apply(m.spectrum(), acc, std::max(0.0, eval_t - b));
}

enum class Scheme { explicit_march, picard };

struct SolverOptions {
  Scheme scheme = Scheme::explicit_march;
  double tol = 1e-8;
  int max_iters = 64;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, double contraction) : Error(what), contraction_(contraction) {}
  double contraction() const { return contraction_; }

 private:
  double contraction_;
};

/**
 * One-step map of the explicit rough exponential scheme:
 * y -> S(dt)[y + F(y) dt + G(y) W_k + DG(y)G(y) WW_k].
 */
class Stepper {
 public:
  Stepper(const SpectralModel& m, const CoefficientSpec& cs, double dt)
      : m_(m), cs_(cs), noise_(m, cs), dt_(dt) {
    decay_ = (-dt * m.spectrum().rates().array()).exp();
  }

  SpectralField increment(const SpectralField& y, const double* w, const double* a) const {
    SpectralField inc = apply_F(m_, cs_, y) * dt_;
    if (cs_.diffusion != DiffusionKind::zero) inc += noise_.step(y, w, a);
    return inc;
  }

  SpectralField step(const SpectralField& y, const double* w, const double* a) const {
    return (decay_ * (y + increment(y, w, a)).array()).matrix();
  }

  const Eigen::ArrayXd& decay() const { return decay_; }

 private:
  const SpectralModel& m_;
  CoefficientSpec cs_;
  NoiseOperator noise_;
  double dt_;
  Eigen::ArrayXd decay_;
};

/** State at grid index k1 of the driver from the state y0 at index k0 (no path storage). */
inline SpectralField march(const SpectralModel& m, const CoefficientSpec& cs, const SpectralField& y0,
                           const RoughPathGrid& rp, std::size_t k0, std::size_t k1) {
  if (k1 < k0 || k1 >= rp.size()) throw DomainError("march: bad index range");
  if (cs.diffusion != DiffusionKind::zero && cs.channels() != rp.dim())
    throw DomainError("march: channel count must match the driver");
  Stepper st(m, cs, rp.grid().dt);
  SpectralField y = y0;
  for (std::size_t k = k0; k < k1; ++k) y = st.step(y, rp.step_increment(k), rp.step_area(k));
  return y;
}

/** Sets y'_t = G(y_t) for a trajectory matrix. */
inline ControlledPath with_gubinelli(const SpectralModel& m, const CoefficientSpec& cs, TimeGrid g,
                                     Eigen::MatrixXd y, std::size_t d) {
  NoiseOperator noise(m, cs);
  std::vector<Eigen::MatrixXd> yp(d, Eigen::MatrixXd::Zero(y.rows(), y.cols()));
  if (cs.diffusion != DiffusionKind::zero)
    for (Eigen::Index k = 0; k < y.cols(); ++k)
      for (std::size_t j = 0; j < d; ++j) yp[j].col(k) = noise.channel(y.col(k), j);
  return ControlledPath(g, std::move(y), std::move(yp));
}

/** Mild solution on the grid interval [a, b] of the driver with y'_t = G(y_t). */
inline ControlledPath solve_rde(const SpectralModel& m, const CoefficientSpec& cs,
                                const SpectralField& y0, const RoughPathGrid& rp, double a, double b,
                                const SolverOptions& opt = {}) {
  if (static_cast<std::size_t>(y0.size()) != m.size())
    throw DomainError("solve_rde: initial field size does not match the truncation");
  if (!y0.allFinite()) throw DomainError("solve_rde: initial field must be finite");
  if (cs.diffusion != DiffusionKind::zero && cs.channels() != rp.dim())
    throw DomainError("solve_rde: channel count must match the driver");
  if (!(b >= a)) throw DomainError("solve_rde: need a <= b");
  if (!rp.grid().covers(a, b)) throw WindowError("solve_rde: interval outside the driver window", a, b);
  const std::size_t ka = rp.grid().checked_index(a, "solve_rde");
  const std::size_t kb = rp.grid().checked_index(b, "solve_rde");
  const std::size_t n = kb - ka + 1;
  const TimeGrid g = rp.grid().sub(ka, n);
  Stepper st(m, cs, rp.grid().dt);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(n));
  y.col(0) = y0;
  if (opt.scheme == Scheme::explicit_march) {
    for (std::size_t k = 0; k + 1 < n; ++k)
      y.col(static_cast<Eigen::Index>(k + 1)) =
          st.step(y.col(static_cast<Eigen::Index>(k)), rp.step_increment(ka + k), rp.step_area(ka + k));
  } else {
    const Eigen::VectorXd wg = m.spectrum().weight_pow(cs.gamma);
    for (std::size_t k = 0; k + 1 < n; ++k)
      y.col(static_cast<Eigen::Index>(k + 1)) = (st.decay() * y.col(static_cast<Eigen::Index>(k)).array()).matrix();
    double prev_diff = 0.0, ratio = 0.0;
    int it = 0;
    for (;; ++it) {
      if (it >= opt.max_iters)
        throw SolverError("solve_rde: Picard iteration did not converge within " +
                              std::to_string(opt.max_iters) + " iterations; last contraction factor " +
                              std::to_string(ratio),
                          ratio);
      Eigen::MatrixXd next(y.rows(), y.cols());
      next.col(0) = y0;
      SpectralField acc = y0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        acc = (st.decay() * (acc + st.increment(y.col(static_cast<Eigen::Index>(k)),
                                                 rp.step_increment(ka + k), rp.step_area(ka + k)))
                                   .array())
                  .matrix();
        next.col(static_cast<Eigen::Index>(k + 1)) = acc;
      }
      const Eigen::MatrixXd diff = next - y;
      const double dmax = std::sqrt((wg.transpose() * diff.cwiseAbs2()).maxCoeff());
      ratio = prev_diff > 0.0 ? dmax / prev_diff : 0.0;
      prev_diff = dmax;
      y = std::move(next);
      if (dmax < opt.tol) break;
    }
  }
  return with_gubinelli(m, cs, g, std::move(y), rp.dim());
}

/**
 * Largest B_gamma residual of the discrete mild equation
 * y_k = S(t_k - t_0) y_0 + sum_{m<k} S(t_k - t_m) [F(y_m) dt + G(y_m) W_m + DG G(y_m) WW_m]
 * at the requested path indices, with each semigroup factor evaluated directly.
 */
inline double mild_residual(const SpectralModel& m, const CoefficientSpec& cs, const ControlledPath& y,
                            const RoughPathGrid& rp, const std::vector<std::size_t>& indices) {
  const std::size_t off = driver_offset(rp, y.grid());
  const double dt = y.grid().dt;
  Stepper st(m, cs, dt);
  const Eigen::VectorXd wg = m.spectrum().weight_pow(cs.gamma);
  const Eigen::ArrayXd rates = m.spectrum().rates().array();
  std::size_t kmax = 0;
  for (std::size_t k : indices) kmax = std::max(kmax, k);
  if (kmax >= y.grid().n) throw DomainError("mild_residual: index outside the path");
  std::vector<SpectralField> incs(kmax);
  for (std::size_t j = 0; j < kmax; ++j)
    incs[j] = st.increment(y.state(j), rp.step_increment(off + j), rp.step_area(off + j));
  double worst = 0.0;
  for (std::size_t k : indices) {
    const double tk = static_cast<double>(k) * dt;
    SpectralField rhs = ((-tk * rates).exp() * y.state(0).array()).matrix();
    for (std::size_t j = 0; j < k; ++j) {
      const double lag = static_cast<double>(k - j) * dt;
      rhs += ((-lag * rates).exp() * incs[j].array()).matrix();
    }
    const SpectralField r = y.state(k) - rhs;
    worst = std::max(worst, std::sqrt((wg.array() * r.array().square()).sum()));
  }
  return worst;
}

struct DNormReport {
  double sup_y = 0.0;
  double sup_yp = 0.0;
  double holder_yp = 0.0;
  double holder_R_alpha = 0.0;
  double holder_R_2alpha = 0.0;
  double total() const { return sup_y + sup_yp + holder_yp + holder_R_alpha + holder_R_2alpha; }
};

namespace detail {

/**
 * Five-term norm of (y1 - y2, y1' - y2') with remainders taken against rp1 and rp2;
 * with running = true the report for every right end [a, t] is returned.
 */
inline std::vector<DNormReport> controlled_terms(const SpectralModel& m, const ControlledPath& z1,
                                                 const RoughPathGrid& rp1, const ControlledPath* z2,
                                                 const RoughPathGrid* rp2, double gamma, double alpha,
                                                 double a, double b, bool running) {
  const auto& g = z1.grid();
  const std::size_t d = z1.channels();
  if (rp1.dim() != d) throw DomainError("dnorm: channel count must match the driver");
  const std::size_t off1 = driver_offset(rp1, g);
  std::size_t off2 = 0;
  if (z2) {
    if (!same_points(g, z2->grid())) throw DomainError("controlled_distance: misaligned grids");
    if (z2->channels() != d || rp2->dim() != d) throw DomainError("controlled_distance: channel mismatch");
    off2 = driver_offset(*rp2, g);
  }
  if (!(b > a)) throw DomainError("dnorm: need a < b");
  const std::size_t ia = g.checked_index(a, "dnorm");
  const std::size_t ib = g.checked_index(b, "dnorm");
  const std::size_t n = ib - ia + 1;
  const auto& sp = m.spectrum();
  const Eigen::RowVectorXd w0 = sp.weight_pow(gamma).transpose();
  const Eigen::RowVectorXd w1 = sp.weight_pow(gamma - alpha).transpose();
  const Eigen::RowVectorXd w2 = sp.weight_pow(gamma - 2.0 * alpha).transpose();
  const auto cols = static_cast<Eigen::Index>(n);
  const auto c0 = static_cast<Eigen::Index>(ia);
  Eigen::MatrixXd Y = z1.y().middleCols(c0, cols);
  std::vector<Eigen::MatrixXd> YP(d);
  for (std::size_t j = 0; j < d; ++j) YP[j] = z1.yp(j).middleCols(c0, cols);
  if (z2) {
    Y -= z2->y().middleCols(c0, cols);
    for (std::size_t j = 0; j < d; ++j) YP[j] -= z2->yp(j).middleCols(c0, cols);
  }
  // prefix path values of the drivers on the interval
  Eigen::MatrixXd X1(static_cast<Eigen::Index>(d), cols), X2;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < d; ++j) X1(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          static_cast<double>(rp1.prefix_x(off1 + ia + k)[j]);
  if (z2) {
    X2.resize(static_cast<Eigen::Index>(d), cols);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < d; ++j) X2(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            static_cast<double>(rp2->prefix_x(off2 + ia + k)[j]);
  }
  const double dt = g.dt;
  auto p1 = lag_powers(n, dt, alpha);
  auto p2 = lag_powers(n, dt, 2.0 * alpha);

  std::vector<double> sup_y(n), sup_yp(n), col_yp(n, 0.0), col_r1(n, 0.0), col_r2(n, 0.0);
  {
    const Eigen::RowVectorXd ny = (w0 * Y.cwiseAbs2()).cwiseSqrt();
    Eigen::RowVectorXd nyp = Eigen::RowVectorXd::Zero(cols);
    for (std::size_t j = 0; j < d; ++j) nyp += w1 * YP[j].cwiseAbs2();
    nyp = nyp.cwiseSqrt();
    for (std::size_t k = 0; k < n; ++k) {
      sup_y[k] = ny[static_cast<Eigen::Index>(k)];
      sup_yp[k] = nyp[static_cast<Eigen::Index>(k)];
    }
  }
  Eigen::MatrixXd R, D;
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const auto ms = static_cast<Eigen::Index>(n - 1 - s);
    const auto ss = static_cast<Eigen::Index>(s);
    R = Y.rightCols(ms).colwise() - Y.col(ss);
    Eigen::RowVectorXd nyp = Eigen::RowVectorXd::Zero(ms);
    for (std::size_t j = 0; j < d; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      Eigen::RowVectorXd W1 = X1.row(jj).rightCols(ms).array() - X1(jj, ss);
      R.noalias() -= z1.yp(j).col(c0 + ss) * W1;
      if (z2) {
        Eigen::RowVectorXd W2 = X2.row(jj).rightCols(ms).array() - X2(jj, ss);
        R.noalias() += z2->yp(j).col(c0 + ss) * W2;
      }
      D = YP[j].rightCols(ms).colwise() - YP[j].col(ss);
      nyp += w2 * D.cwiseAbs2();
    }
    const Eigen::MatrixXd R2 = R.cwiseAbs2();
    const Eigen::RowVectorXd r1 = w1 * R2;
    const Eigen::RowVectorXd r2 = w2 * R2;
    for (Eigen::Index t = 0; t < ms; ++t) {
      const std::size_t lag = static_cast<std::size_t>(t) + 1;
      const std::size_t tt = s + lag;
      col_yp[tt] = std::max(col_yp[tt], std::sqrt(nyp[t]) / p1[lag]);
      col_r1[tt] = std::max(col_r1[tt], std::sqrt(r1[t]) / p1[lag]);
      col_r2[tt] = std::max(col_r2[tt], std::sqrt(r2[t]) / p2[lag]);
    }
  }
  std::vector<DNormReport> out;
  DNormReport acc;
  for (std::size_t k = 0; k < n; ++k) {
    acc.sup_y = std::max(acc.sup_y, sup_y[k]);
    acc.sup_yp = std::max(acc.sup_yp, sup_yp[k]);
    acc.holder_yp = std::max(acc.holder_yp, col_yp[k]);
    acc.holder_R_alpha = std::max(acc.holder_R_alpha, col_r1[k]);
    acc.holder_R_2alpha = std::max(acc.holder_R_2alpha, col_r2[k]);
    if (running) out.push_back(acc);
  }
  if (!running) out.push_back(acc);
  return out;
}

}  // namespace detail

/** Controlled-path norm over grid times [a, b]. */
inline DNormReport dnorm(const SpectralModel& m, const ControlledPath& z, const RoughPathGrid& rp,
                         double gamma, double alpha, double a, double b) {
  return detail::controlled_terms(m, z, rp, nullptr, nullptr, gamma, alpha, a, b, false).back();
}

/** dnorm over [a, t] for every grid time t in [a, b]. */
inline std::vector<DNormReport> dnorm_running(const SpectralModel& m, const ControlledPath& z,
                                              const RoughPathGrid& rp, double gamma, double alpha,
                                              double a, double b) {
  return detail::controlled_terms(m, z, rp, nullptr, nullptr, gamma, alpha, a, b, true);
}

/** Five-term distance between controlled paths over different drivers on a shared grid. */
inline DNormReport controlled_distance_terms(const SpectralModel& m, const ControlledPath& z1,
                                             const RoughPathGrid& rp1, const ControlledPath& z2,
                                             const RoughPathGrid& rp2, double gamma, double alpha,
                                             double a, double b) {
  return detail::controlled_terms(m, z1, rp1, &z2, &rp2, gamma, alpha, a, b, false).back();
}

inline double controlled_distance(const SpectralModel& m, const ControlledPath& z1,
                                  const RoughPathGrid& rp1, const ControlledPath& z2,
                                  const RoughPathGrid& rp2, double gamma, double alpha, double a,
                                  double b) {
  return controlled_distance_terms(m, z1, rp1, z2, rp2, gamma, alpha, a, b).total();
}

}  // namespace rough_attractor

#endif
