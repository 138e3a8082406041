#ifndef ROUGH_ATTRACTOR_FBM_HPP
#define ROUGH_ATTRACTOR_FBM_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "grid.hpp"

namespace rough_attractor {

class FbmError : public Error {
 public:
  using Error::Error;
};

struct FbmParams {
  double hurst = 0.4;
  double q = 1.0;
  std::size_t d = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw DomainError("fbm: hurst must lie in (0, 1)");
    if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("fbm: q must be finite and >= 0");
    if (d == 0) throw DomainError("fbm: dimension must be positive");
  }
};

/** Cov(B_t, B_s) for one component of a fractional Brownian motion with scale q. */
inline double fbm_covariance(double t, double s, double hurst, double q) {
  const double h2 = 2.0 * hurst;
  return 0.5 * q * q *
         (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) -
          std::pow(std::abs(t - s), h2));
}

/**
 * A d-dimensional path sampled on a uniform grid and anchored at 0 at time 0.
 * Values are stored once and shared, so Wiener shifts and windows are views:
 * value(k) = raw(k) - raw(origin).
 */
class GridPath {
 public:
  GridPath() = default;

  /** values holds n rows of d entries; the grid must contain time 0. */
  GridPath(double t0, double dt, std::size_t d, std::vector<double> values)
      : d_(d) {
    if (!(dt > 0.0)) throw DomainError("GridPath: dt must be positive");
    if (d == 0 || values.size() % d != 0 || values.size() / d < 2)
      throw DomainError("GridPath: need at least two points of dimension d");
    const std::size_t n = values.size() / d;
    const double r = t0 / dt;
    const double k = std::nearbyint(r);
    if (std::abs(r - k) > 1e-7) throw DomainError("GridPath: t0 must be a multiple of dt");
    grid_ = TimeGrid{dt, static_cast<std::int64_t>(k), n};
    if (grid_.first > 0 || grid_.last() < 0)
      throw DomainError("GridPath: the grid must contain time 0");
    raw_ = std::make_shared<const std::vector<double>>(std::move(values));
    offset_ = 0;
    origin_ = static_cast<std::size_t>(-grid_.first);
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return d_; }
  std::size_t size() const { return grid_.n; }
  std::size_t zero_index() const { return origin_ - offset_; }

  double value(std::size_t k, std::size_t c) const {
    return (*raw_)[(offset_ + k) * d_ + c] - (*raw_)[origin_ * d_ + c];
  }
  /** Increment over step k; independent of the anchor so shifts keep it bitwise. */
  double step(std::size_t k, std::size_t c) const {
    const std::size_t r = (offset_ + k) * d_ + c;
    return (*raw_)[r + d_] - (*raw_)[r];
  }

  /** theta_tau W (t) = W(t + tau) - W(tau); tau must be a grid time. */
  GridPath shifted(double tau) const {
    const std::size_t k = grid_.checked_index(tau, "wiener_shift");
    GridPath p = *this;
    p.origin_ = offset_ + k;
    // tau sits at grid point k and becomes the new time 0
    p.grid_.first = -static_cast<std::int64_t>(k);
    return p;
  }

  /** Restriction to the grid points in [a, b]; both ends must be grid times. */
  GridPath window(double a, double b) const {
    const std::size_t ka = grid_.checked_index(a, "GridPath::window");
    const std::size_t kb = grid_.checked_index(b, "GridPath::window");
    if (kb <= ka) throw DomainError("GridPath::window: empty interval");
    if (a > 0.0 || b < 0.0) throw DomainError("GridPath::window: must contain time 0");
    GridPath p = *this;
    p.offset_ = offset_ + ka;
    p.grid_ = grid_.sub(ka, kb - ka + 1);
    return p;
  }

  std::vector<double> row(std::size_t k) const {
    std::vector<double> out(d_);
    for (std::size_t c = 0; c < d_; ++c) out[c] = value(k, c);
    return out;
  }

 private:
  std::shared_ptr<const std::vector<double>> raw_;
  std::size_t d_ = 0;
  std::size_t offset_ = 0;
  std::size_t origin_ = 0;
  TimeGrid grid_;
};

inline GridPath wiener_shift(const GridPath& path, double tau) { return path.shifted(tau); }

enum class FbmMethod { automatic, circulant, cholesky };

namespace detail {

inline double increment_autocov(std::size_t k, double hurst, double q, double dt) {
  const double h2 = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  const double g = std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::abs(kk - 1.0), h2);
  return 0.5 * q * q * std::pow(dt, h2) * g;
}

inline std::vector<double> circulant_eigenvalues(std::size_t m_incr, double hurst, double q,
                                                 double dt, std::size_t& size) {
  std::size_t m = 1;
  while (m < m_incr) m <<= 1;
  size = 2 * m;
  std::vector<std::complex<double>> c(size), lam;
  for (std::size_t k = 0; k <= m; ++k) c[k] = increment_autocov(k, hurst, q, dt);
  for (std::size_t k = 1; k < m; ++k) c[size - k] = c[k];
  Eigen::FFT<double> fft;
  fft.fwd(lam, c);
  std::vector<double> out(size);
  for (std::size_t j = 0; j < size; ++j) out[j] = lam[j].real();
  return out;
}

}  // namespace detail

/**
 * Samples fBm on the grid t0 + k dt, k < n, anchored so that the value at time 0 is 0.
 * Each component uses its own stream seeded from (seed, component).
 * Davies-Harte circulant embedding is used unless an embedding eigenvalue is
 * negative, in which case a dense Cholesky factor of the increment covariance is used.
 */
inline GridPath sample_fbm(const FbmParams& p, double t0, double dt, std::size_t n,
                           FbmMethod method = FbmMethod::automatic) {
  p.validate();
  if (!(dt > 0.0) || n < 2) throw DomainError("sample_fbm: need dt > 0 and n >= 2");
  const double r = t0 / dt;
  if (std::abs(r - std::nearbyint(r)) > 1e-7) throw DomainError("sample_fbm: t0 must be a multiple of dt");
  const std::int64_t first = static_cast<std::int64_t>(std::nearbyint(r));
  if (first > 0 || first + static_cast<std::int64_t>(n) - 1 < 0)
    throw DomainError("sample_fbm: the grid must contain time 0");
  const std::size_t m = n - 1;

  std::size_t size = 0;
  std::vector<double> lam;
  bool use_circulant = method != FbmMethod::cholesky;
  if (use_circulant) {
    lam = detail::circulant_eigenvalues(m, p.hurst, p.q, dt, size);
    double lmax = 0.0, lmin = 0.0;
    for (double l : lam) {
      lmax = std::max(lmax, l);
      lmin = std::min(lmin, l);
    }
    if (lmin < -1e-10 * std::max(lmax, 1e-300)) {
      if (method == FbmMethod::circulant)
        throw FbmError("sample_fbm: circulant embedding has a negative eigenvalue");
      use_circulant = false;
    }
  }

  Eigen::MatrixXd chol_l;
  if (!use_circulant) {
    if (m > 4096)
      throw FbmError("sample_fbm: circulant embedding failed and " + std::to_string(m) +
                     " increments exceed the dense Cholesky limit of 4096");
    Eigen::MatrixXd cov(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        cov(i, j) = detail::increment_autocov(i > j ? i - j : j - i, p.hurst, p.q, dt);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw FbmError("sample_fbm: increment covariance is not positive definite");
    chol_l = llt.matrixL();
  }

  std::vector<double> values(n * p.d, 0.0);
  Eigen::FFT<double> fft;
  std::vector<double> incr(m);
  for (std::size_t c = 0; c < p.d; ++c) {
    std::seed_seq seq{static_cast<std::uint32_t>(p.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(p.seed >> 32),
                      static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    if (use_circulant) {
      std::vector<std::complex<double>> z(size), y;
      for (std::size_t j = 0; j < size; ++j) {
        const double a = normal(rng);
        const double b = normal(rng);
        z[j] = std::sqrt(std::max(lam[j], 0.0) / static_cast<double>(size)) *
               std::complex<double>(a, b);
      }
      fft.fwd(y, z);
      for (std::size_t k = 0; k < m; ++k) incr[k] = y[k].real();
    } else {
      Eigen::VectorXd g(m);
      for (std::size_t k = 0; k < m; ++k) g[k] = normal(rng);
      Eigen::VectorXd x = chol_l * g;
      for (std::size_t k = 0; k < m; ++k) incr[k] = x[k];
    }
    double acc = 0.0;
    values[c] = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      acc += incr[k];
      values[(k + 1) * p.d + c] = acc;
    }
  }
  // Cumulative sums from the left end; GridPath re-anchors them at time 0.
  return GridPath(t0, dt, p.d, std::move(values));
}

inline void write_path_csv(const GridPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file);
  out << "t";
  for (std::size_t c = 0; c < path.dim(); ++c) out << ",w" << (c + 1);
  out << "\n";
  char buf[64];
  for (std::size_t k = 0; k < path.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", path.grid().time(k));
    out << buf;
    for (std::size_t c = 0; c < path.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", path.value(k, c));
      out << ',' << buf;
    }
    out << "\n";
  }
}

inline GridPath read_path_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file);
  std::string line;
  std::getline(in, line);
  std::size_t d = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    times.push_back(std::stod(cell));
    for (std::size_t c = 0; c < d; ++c) {
      std::getline(ss, cell, ',');
      values.push_back(std::stod(cell));
    }
  }
  if (times.size() < 2) throw Error(file + ": need at least two rows");
  const double dt = times[1] - times[0];
  const double t0 = std::nearbyint(times[0] / dt) * dt;
  return GridPath(t0, dt, d, std::move(values));
}

}  // namespace rough_attractor

#endif
