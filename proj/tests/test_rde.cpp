#include <gtest/gtest.h>

#include <rough_attractor/rde.hpp>

#include <cmath>
#include <random>

#include "support.hpp"

namespace ra = rough_attractor;
using testing_support::fbm;

namespace {

ra::CoefficientSpec default_coefficients() {
  ra::CoefficientSpec cs;
  cs.drift = ra::DriftKind::sine;
  cs.drift_scale = 0.08;
  cs.forcing = 0.08;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.08};
  return cs;
}

ra::SpectralField e1(std::size_t n, double a = 1.0) {
  ra::SpectralField x = ra::SpectralField::Zero(static_cast<Eigen::Index>(n));
  x[0] = a;
  return x;
}

constexpr double kDt = 1.0 / 512;

}  // namespace

TEST(SolveRde, HeatEquationIsExactSemigroup) {
  const auto m = ra::SpectralModel::dirichlet(16);
  const ra::CoefficientSpec cs;  // zero drift, zero diffusion
  const auto rp = ra::canonical_lift(fbm(0.4, 0.1, 1, 1, 0.0, 513, kDt));
  ra::SpectralField y0(16);
  for (int k = 0; k < 16; ++k) y0[k] = 1.0 / (k + 1);
  const auto sol = ra::solve_rde(m, cs, y0, rp, 0.0, 1.0);
  for (std::size_t k : {0u, 100u, 512u}) {
    const auto exact = ra::semigroup_apply(m.spectrum(), y0, k * kDt);
    EXPECT_LT((sol.state(k) - exact).norm(), 1e-14 * y0.norm());
  }
}

// one mode, G(y) = b y, F = 0: the rough solution is y0 exp(-lambda t + b W_t)
TEST(SolveRde, ScalarLinearNoiseMatchesExponential) {
  const ra::SpectralModel m(ra::Spectrum({2.0}, {2.0}));
  ra::CoefficientSpec cs;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.3};
  cs.sigma = 0.05;
  const double b = 0.3 * std::pow(2.0, 0.025);
  const double dt = std::ldexp(1.0, -12);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto p = fbm(0.4, 1.0, 1, seed, 0.0, 4097, dt);
    const auto sol = ra::solve_rde(m, cs, e1(1), ra::canonical_lift(p), 0.0, 1.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < p.size(); k += 128) {
      const double exact = std::exp(-2.0 * k * dt + b * p.value(k, 0));
      worst = std::max(worst, std::abs(sol.state(k)[0] - exact) / exact);
    }
    EXPECT_LT(worst, 1e-3) << seed;
  }
}

TEST(SolveRde, ScalarErrorShrinksWithStep) {
  // local error is O(|W_{k,k+1}|^3), so halving dt reduces the global error
  const ra::SpectralModel m(ra::Spectrum({2.0}, {2.0}));
  ra::CoefficientSpec cs;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.5};
  const double b = 0.5 * std::pow(2.0, cs.sigma / 2);
  const double fine = std::ldexp(1.0, -14);
  std::vector<double> err(3, 0.0);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto p = fbm(0.45, 1.0, 1, seed, 0.0, (1u << 14) + 1, fine);
    const double exact = std::exp(-2.0 + b * p.value(p.size() - 1, 0));
    int r = 0;
    for (std::size_t stride : {64u, 16u, 4u}) {
      std::vector<double> v;
      for (std::size_t k = 0; k < p.size(); k += stride) v.push_back(p.value(k, 0));
      const auto rp = ra::canonical_lift(testing_support::path_from(0.0, fine * stride, 1, v));
      const double e = ra::solve_rde(m, cs, e1(1), rp, 0.0, 1.0).final_state()[0] - exact;
      err[r++] += e * e;
    }
  }
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[2], err[1]);
}

TEST(SolveRde, MildResidualIsRoundoff) {
  const auto m = ra::SpectralModel::dirichlet(32);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 2, -1.0, 1025, kDt));
  const auto sol = ra::solve_rde(m, cs, e1(32), rp, -0.5, 0.5);
  EXPECT_EQ(sol.grid().t0(), -0.5);
  EXPECT_LT(ra::mild_residual(m, cs, sol, rp, {1, 17, 256, 512}), 1e-13);
}

TEST(SolveRde, PicardAgreesWithExplicitMarch) {
  const auto m = ra::SpectralModel::dirichlet(16);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 3, 0.0, 129, kDt));
  ra::SolverOptions picard{ra::Scheme::picard, 1e-13, 200};
  const auto a = ra::solve_rde(m, cs, e1(16), rp, 0.0, 0.25);
  const auto b = ra::solve_rde(m, cs, e1(16), rp, 0.0, 0.25, picard);
  EXPECT_LT((a.y() - b.y()).cwiseAbs().maxCoeff(), 1e-12);
  ra::SolverOptions starved{ra::Scheme::picard, 1e-13, 1};
  EXPECT_THROW(ra::solve_rde(m, cs, e1(16), rp, 0.0, 0.25, starved), ra::SolverError);
}

TEST(SolveRde, GubinelliDerivativeIsG) {
  const auto m = ra::SpectralModel::dirichlet(8);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 4, 0.0, 65, kDt));
  const auto sol = ra::solve_rde(m, cs, e1(8), rp, 0.0, 0.125);
  ra::NoiseOperator g(m, cs);
  for (std::size_t k = 0; k < sol.grid().n; k += 9)
    EXPECT_LT((sol.yp(0).col(static_cast<Eigen::Index>(k)) - g.channel(sol.state(k), 0)).norm(), 1e-16);
}

TEST(SolveRde, InputErrors) {
  const auto m = ra::SpectralModel::dirichlet(8);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 4, 0.0, 65, kDt));
  EXPECT_THROW(ra::solve_rde(m, cs, e1(7), rp, 0.0, 0.1), ra::DomainError);
  EXPECT_THROW(ra::solve_rde(m, cs, e1(8), rp, 0.0, 1.0), ra::WindowError);
  auto two = cs;
  two.channel_scale = {0.01, 0.01};
  EXPECT_THROW(ra::solve_rde(m, two, e1(8), rp, 0.0, 0.1), ra::DomainError);
  ra::SpectralField nan = e1(8);
  nan[2] = std::nan("");
  EXPECT_THROW(ra::solve_rde(m, cs, nan, rp, 0.0, 0.1), ra::DomainError);
}

TEST(RoughConvolution, FrozenConstantIntegrandSumsIncrements) {
  // A = 0 and z constant: the z W part telescopes on any partition; the z' WW part
  // matches the Chen area only for a single coarse step
  const ra::SpectralModel m(ra::Spectrum::frozen(4));
  const auto rp = ra::canonical_lift(fbm(0.4, 1.0, 1, 6, 0.0, 257, kDt));
  const ra::TimeGrid g = rp.grid();
  ra::SpectralField z(4), zp(4);
  z << 1, -2, 0.5, 3;
  zp << 0.1, 0.2, -0.3, 0.0;
  const auto c = ra::chen_reconstruct(rp, 0.125, 0.375);
  ra::Integrand first{g, {z.replicate(1, 257)}, {ra::SpectralField::Zero(4).replicate(1, 257)}};
  for (std::size_t stride : {1u, 4u, 32u, 128u})
    EXPECT_LT((ra::rough_convolution(m, first, rp, 0.125, 0.375, 0.375, stride) - z * c.increment[0]).norm(),
              1e-13)
        << stride;
  ra::Integrand both{g, {z.replicate(1, 257)}, {zp.replicate(1, 257)}};
  const ra::SpectralField expect = z * c.increment[0] + zp * c.area(0, 0);
  EXPECT_LT((ra::rough_convolution(m, both, rp, 0.125, 0.375, 0.375, 128) - expect).norm(), 1e-14);
  EXPECT_THROW(ra::rough_convolution(m, both, rp, 0.125, 0.375, 0.375, 3), ra::DomainError);
  EXPECT_THROW(ra::rough_convolution(m, both, rp, 0.125, 0.375, 0.25, 1), ra::DomainError);
}

TEST(RoughConvolution, CrossIntegralIsDifference) {
  const auto m = ra::SpectralModel::dirichlet(8);
  const auto cs = default_coefficients();
  const auto rp1 = ra::canonical_lift(fbm(0.4, 0.05, 1, 7, 0.0, 257, kDt));
  const auto rp2 = ra::canonical_lift(fbm(0.4, 0.05, 1, 8, 0.0, 257, kDt));
  const auto s1 = ra::solve_rde(m, cs, e1(8), rp1, 0.0, 0.5);
  const auto s2 = ra::solve_rde(m, cs, e1(8), rp2, 0.0, 0.5);
  const auto z1 = ra::integrand_from_solution(m, cs, s1), z2 = ra::integrand_from_solution(m, cs, s2);
  const auto d = ra::cross_noise_integral(m, z1, rp1, z2, rp2, 0.0, 0.25, 0.5, 2);
  const ra::SpectralField e = ra::rough_convolution(m, z1, rp1, 0.0, 0.25, 0.5, 2) -
                 ra::rough_convolution(m, z2, rp2, 0.0, 0.25, 0.5, 2);
  EXPECT_LT((d - e).norm(), 1e-15);
}

TEST(DNorm, HeatPathTerms) {
  // no noise: y' = 0, so the remainder is the increment of y
  const auto m = ra::SpectralModel::dirichlet(8);
  ra::CoefficientSpec cs;
  cs.channel_scale = {0.0};
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 4, 0.0, 65, kDt));
  const auto sol = ra::solve_rde(m, cs, e1(8, 2.0), rp, 0.0, 0.125);
  const auto r = ra::dnorm(m, sol, rp, 0.1, 0.35, 0.0, 0.125);
  EXPECT_NEAR(r.sup_y, 2.0 * std::pow(2.0, 0.05), 1e-14);
  EXPECT_EQ(r.sup_yp, 0.0);
  EXPECT_EQ(r.holder_yp, 0.0);
  // only mode 1 is excited: y_1(t) = 2 e^{-2t}
  double h1 = 0.0, h2 = 0.0;
  for (int i = 0; i <= 64; ++i)
    for (int j = i + 1; j <= 64; ++j) {
      const double inc = std::abs(2.0 * (std::exp(-2.0 * j * kDt) - std::exp(-2.0 * i * kDt)));
      h1 = std::max(h1, inc * std::pow(2.0, (0.1 - 0.35) / 2) / std::pow((j - i) * kDt, 0.35));
      h2 = std::max(h2, inc * std::pow(2.0, (0.1 - 0.7) / 2) / std::pow((j - i) * kDt, 0.7));
    }
  EXPECT_NEAR(r.holder_R_alpha, h1, 1e-12);
  EXPECT_NEAR(r.holder_R_2alpha, h2, 1e-12);
}

TEST(DNorm, DistanceIdentities) {
  const auto m = ra::SpectralModel::dirichlet(16);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 5, 0.0, 257, kDt));
  const auto sol = ra::solve_rde(m, cs, e1(16), rp, 0.0, 0.5);
  EXPECT_EQ(ra::controlled_distance(m, sol, rp, sol, rp, 0.1, 0.35, 0.0, 0.5), 0.0);
  const double n = ra::dnorm(m, sol, rp, 0.1, 0.35, 0.0, 0.5).total();
  EXPECT_NEAR(ra::controlled_distance(m, sol, rp, sol.scaled(0.0), rp, 0.1, 0.35, 0.0, 0.5), n, 1e-13 * n);
  // the norm is homogeneous
  EXPECT_NEAR(ra::dnorm(m, sol.scaled(3.0), rp, 0.1, 0.35, 0.0, 0.5).total(), 3.0 * n, 1e-12 * n);
  const auto run = ra::dnorm_running(m, sol, rp, 0.1, 0.35, 0.0, 0.5);
  ASSERT_EQ(run.size(), 257u);
  EXPECT_NEAR(run.back().total(), n, 1e-15 * n);
  for (std::size_t k = 1; k < run.size(); ++k) EXPECT_GE(run[k].total(), run[k - 1].total());
  EXPECT_NEAR(run[128].total(), ra::dnorm(m, sol, rp, 0.1, 0.35, 0.0, 0.25).total(), 1e-15 * n);
}

TEST(DNorm, RemainderAgainstDefinition) {
  const auto m = ra::SpectralModel::dirichlet(8);
  const auto cs = default_coefficients();
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 5, -0.25, 257, kDt));
  const auto sol = ra::solve_rde(m, cs, e1(8), rp, 0.0, 0.25);
  const auto c = ra::chen_reconstruct(rp, 0.0625, 0.125);
  const ra::SpectralField expect = sol.state(64) - sol.state(32) - sol.yp(0).col(32) * c.increment[0];
  EXPECT_LT((ra::remainder(sol, rp, 32, 64) - expect).norm(), 1e-16);
}
