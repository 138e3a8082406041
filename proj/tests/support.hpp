#ifndef ROUGH_ATTRACTOR_TESTS_SUPPORT_HPP
#define ROUGH_ATTRACTOR_TESTS_SUPPORT_HPP

#include <rough_attractor/fbm.hpp>
#include <rough_attractor/roughpath.hpp>

#include <cmath>
#include <vector>

namespace testing_support {

namespace ra = rough_attractor;

inline ra::GridPath fbm(double hurst, double q, std::size_t d, std::uint64_t seed, double t0, std::size_t n,
                        double dt) {
  return ra::sample_fbm(ra::FbmParams{hurst, q, d, seed}, t0, dt, n);
}

/** Path from explicit values with t0 at grid index first. */
inline ra::GridPath path_from(double t0, double dt, std::size_t d, std::vector<double> v) {
  return ra::GridPath(t0, dt, d, std::move(v));
}

/** (W_{i,j}, WW_{i,j}) by summing the steps in long double, without the prefix tables. */
struct Brute {
  std::vector<long double> x, a;
};

inline Brute brute_pair(const ra::RoughPathGrid& rp, std::size_t i, std::size_t j) {
  const std::size_t d = rp.dim();
  Brute b{std::vector<long double>(d, 0.0L), std::vector<long double>(d * d, 0.0L)};
  for (std::size_t k = i; k < j; ++k) {
    const double* w = rp.step_increment(k);
    const double* s = rp.step_area(k);
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = 0; q < d; ++q) b.a[p * d + q] += s[p * d + q] + b.x[p] * w[q];
    for (std::size_t p = 0; p < d; ++p) b.x[p] += w[p];
  }
  return b;
}

inline long double frob(const std::vector<long double>& v) {
  long double s = 0.0L;
  for (auto e : v) s += e * e;
  return std::sqrt(s);
}

/** All-pairs Hoelder norm from brute_pair; O(n^3), only for short paths. */
inline ra::HolderNorm brute_holder(const ra::RoughPathGrid& rp, double alpha, std::size_t ia, std::size_t ib) {
  ra::HolderNorm out;
  const double dt = rp.grid().dt;
  for (std::size_t i = ia; i < ib; ++i)
    for (std::size_t j = i + 1; j <= ib; ++j) {
      const auto b = brute_pair(rp, i, j);
      const double h = static_cast<double>(j - i) * dt;
      out.level1 = std::max(out.level1, static_cast<double>(frob(b.x)) / std::pow(h, alpha));
      out.level2 = std::max(out.level2, static_cast<double>(frob(b.a)) / std::pow(h, 2.0 * alpha));
    }
  return out;
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace testing_support

#endif
