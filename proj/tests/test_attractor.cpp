#include <gtest/gtest.h>

#include <rough_attractor/attractor.hpp>

#include <cmath>
#include <random>

#include "support.hpp"

namespace ra = rough_attractor;
using testing_support::fbm;

namespace {

constexpr double kDt = 1.0 / 256;

ra::RoughPathGrid zero_driver(double half) {
  const auto n = static_cast<std::size_t>(2 * half / kDt);
  return ra::zero_rough_path(ra::TimeGrid{kDt, -static_cast<std::int64_t>(n / 2), n + 1}, 1);
}

ra::AttractorParams attractor_params() {
  ra::AttractorParams p;
  p.mu = 0.1;
  p.nu = 0.05;
  p.lambda = 2.0;
  p.c = 2.1;
  p.i_max = 20;
  return p;
}

}  // namespace

TEST(Gronwall, RecursionStaysBelowClosedFormBound) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int draw = 0; draw < 200; ++draw) {
    ra::GronwallParams p;
    p.k1 = 0.02 + 0.6 * u(rng);
    p.k2 = u(rng);
    p.k0 = 3.0 * u(rng);
    p.v0 = 5.0 * u(rng);
    p.lambda_star = 0.5 + 3.5 * u(rng);
    const double gap = -(2.0 / p.lambda_star) * std::log(p.k1);
    p.t = {0.0};
    for (int i = 1; i < 40; ++i) p.t.push_back(p.t.back() + gap * (0.05 + 0.95 * u(rng)));
    ASSERT_NO_THROW(p.validate());
    const auto U = ra::gronwall_recursion(p, 40);
    EXPECT_DOUBLE_EQ(U[1], ra::gronwall_bound(p, 1));
    for (int i = 1; i <= 40; ++i) EXPECT_LE(U[i], ra::gronwall_bound(p, i) * (1 + 1e-12)) << draw << " " << i;
  }
}

// with k1 = 0 the recursion decouples: U_i = k0 v0 e^{-l t_{i-1}} + k2 (1 + sum_{m<i} e^{-l(t_{i-1}-t_m)})
TEST(Gronwall, DecoupledCase) {
  ra::GronwallParams p;
  p.k0 = 1.5;
  p.k2 = 0.3;
  p.v0 = 2.0;
  p.lambda_star = 1.0;
  p.t = {0.0, 0.5, 1.25, 2.0};
  const auto U = ra::gronwall_recursion(p, 4);
  const double t3 = 1.25;
  const double expect = 3.0 * std::exp(-t3) + 0.3 * (1.0 + std::exp(-(t3 - 0.5)) + std::exp(-(t3 - 1.25)));
  EXPECT_NEAR(U[3], expect, 1e-15);
}

TEST(Gronwall, ValidationNamesConstraints) {
  ra::GronwallParams p;
  p.k1 = 0.3;
  p.lambda_star = 2.0;
  p.t = {0.0, 5.0};  // gap > -(2/lambda) log k1 = 1.2
  EXPECT_THROW(p.validate(), ra::DomainError);
  p.t = {0.0, 1.0};
  EXPECT_NO_THROW(p.validate());
  p.k1 = 1.2;
  EXPECT_THROW(p.validate(), ra::DomainError);
  EXPECT_THROW(ra::GronwallParams::from_constant(10.0, 0.1, 2.0, 1.0, {0.0}), ra::DomainError);
  const auto q = ra::GronwallParams::from_constant(2.0, 0.1, 2.0, 1.0, {0.0});
  EXPECT_DOUBLE_EQ(q.k0, 2.5);
  EXPECT_DOUBLE_EQ(q.k1, 0.25);
}

TEST(AttractorParams, ConstantsAndViolations) {
  auto p = attractor_params();
  EXPECT_NEAR(p.k1(), 0.21 / 0.79, 1e-15);
  EXPECT_NEAR(p.k0(), 2.1 / 0.79, 1e-15);
  EXPECT_TRUE(p.violations(0.99).empty());
  const auto v = p.violations(0.05);
  EXPECT_NE(std::find(v.begin(), v.end(), "nu + d1 > 1"), v.end());
  EXPECT_NE(std::find(v.begin(), v.end(), "d1 > 2(log(1+k1)+nu)/lambda"), v.end());
  p.c = 20.0;
  EXPECT_EQ(p.violations(1.0), std::vector<std::string>{"k1(mu) < 1"});
  p.c = 4.0;  // k1 = 2/3: -log k1 < 1
  EXPECT_EQ(p.violations(1.0).front(), "-(2/lambda) log k1(mu) > 1");
}

// T_m = m: R = 4 k2 / (1 - (1 + k1) e^{-lambda/2})
TEST(AbsorbingRadius, ZeroNoiseGeometricSeries) {
  const auto p = attractor_params();
  const auto seq = ra::build_sequence(zero_driver(60.0), ra::StoppingParams{}, -50, 0);
  const auto r = ra::absorbing_radius(seq, -1, p);
  const double ratio = (1.0 + p.k1()) * std::exp(-1.0);
  EXPECT_NEAR(r.ratio, ratio, 1e-15);
  EXPECT_NEAR(r.radius, 4.0 * p.k2() / (1.0 - ratio), 1e-9);
  EXPECT_FALSE(r.window_exhausted);
}

TEST(AbsorbingRadius, DivergenceAndShortSequences) {
  auto p = attractor_params();
  p.lambda = 0.2;
  const auto seq = ra::build_sequence(zero_driver(12.0), ra::StoppingParams{}, -10, 0);
  EXPECT_THROW(ra::absorbing_radius(seq, -1, p), ra::RadiusDivergence);
  p = attractor_params();
  const auto r = ra::absorbing_radius(seq, -1, p);
  EXPECT_TRUE(r.window_exhausted);  // 10 terms do not reach epsilon
  EXPECT_GT(r.tail, 0.0);
  EXPECT_THROW(ra::absorbing_radius(seq, -10, p), ra::DomainError);
}

TEST(Bundle, DirectionsAndDistances) {
  const auto a = ra::bundle_directions(16, 5, 3), b = ra::bundle_directions(16, 5, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i].norm(), 1.0, 1e-15);
    EXPECT_EQ(a[i], b[i]);
  }
  std::vector<ra::SpectralField> P{ra::SpectralField::Zero(2), ra::SpectralField::Ones(2)};
  std::vector<ra::SpectralField> Q{ra::SpectralField::Zero(2)};
  EXPECT_DOUBLE_EQ(ra::bundle_diameter(P), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(ra::hausdorff_one_sided(P, Q), std::sqrt(2.0));
  EXPECT_EQ(ra::hausdorff_one_sided(Q, P), 0.0);
  EXPECT_THROW(ra::hausdorff_one_sided({}, Q), ra::DomainError);
}

TEST(PhiStep, CocycleOverStoppingTimes) {
  const auto m = ra::SpectralModel::dirichlet(8);
  ra::CoefficientSpec cs;
  cs.drift = ra::DriftKind::sine;
  cs.drift_scale = 0.08;
  cs.forcing = 0.08;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.08};
  const auto rp = ra::canonical_lift(fbm(0.4, 0.05, 1, 2, -6.0, 12 * 256 + 1, kDt));
  const ra::StoppingParams sp;
  ra::SpectralField y0 = ra::SpectralField::Zero(8);
  y0[0] = 1.0;
  // Phi(i + j, 0) = Phi(i, j) o Phi(j, 0)
  const auto direct = ra::phi_step(m, cs, y0, rp, sp, 3, 0);
  const auto split = ra::phi_step(m, cs, ra::phi_step(m, cs, y0, rp, sp, 1, 0), rp, sp, 2, 1);
  EXPECT_EQ(direct, split);
  EXPECT_EQ(ra::phi_step(m, cs, y0, rp, sp, 0, -2), y0);
  const auto iv = ra::phi_interval(rp, sp, 2, -2);
  EXPECT_LE(iv.t_start, -0.0);
  EXPECT_LE(rp.grid().time(iv.k_end), iv.t_end);
  EXPECT_THROW(ra::phi_interval(rp, sp, -1, 0), ra::DomainError);
}

// no noise and a contracting drift: every bundle collapses onto the forced equilibrium
TEST(Pullback, DegenerateCaseCollapses) {
  const auto m = ra::SpectralModel::dirichlet(16);
  ra::CoefficientSpec cs;
  cs.drift = ra::DriftKind::linear;
  cs.drift_scale = 0.05;
  cs.forcing = 0.08;
  cs.channel_scale = {0.0};
  auto p = attractor_params();
  const auto rp = zero_driver(24.0);
  const auto rep = ra::pullback_estimate(m, cs, rp, ra::StoppingParams{}, p);
  ASSERT_EQ(rep.diam_series.size(), 20u);
  EXPECT_LT(rep.diam_series.back(), 1e-6);
  for (std::size_t i = 1; i < rep.diam_series.size(); ++i) EXPECT_LE(rep.start_times[i], rep.start_times[i - 1]);
  EXPECT_EQ(rep.start_times.back(), -20.0);
  EXPECT_EQ(rep.absorb_index, 1);
  // fixed point of the one-step map y -> e^{-2 dt} (y - 0.05 y dt + 0.08 dt) in mode 1
  const double decay = std::exp(-2.0 * kDt);
  EXPECT_NEAR(rep.sample.front()[0], decay * 0.08 * kDt / (1.0 - decay * (1.0 - 0.05 * kDt)), 1e-12);
  EXPECT_NEAR(rep.sample.front()[0], 0.08 / 2.05, 0.01 * 0.08 / 2.05);
  const auto tail = ra::pullback_estimate(m, cs, rp, ra::StoppingParams{}, p, false);
  ASSERT_EQ(tail.sup_series.size(), 1u);
  EXPECT_EQ(tail.sup_series[0], rep.sup_series.back());
}

// matched-seed bundle images under W and the smoothed drivers W^eta
TEST(Semicontinuity, SmallEtaStaysClose) {
  const auto m = ra::SpectralModel::dirichlet(16);
  ra::CoefficientSpec cs;
  cs.drift = ra::DriftKind::sine;
  cs.drift_scale = 0.08;
  cs.forcing = 0.08;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.08};
  auto p = attractor_params();
  p.i_max = 6;
  p.bundle_size = 4;
  const auto path = fbm(0.4, 0.015, 1, 1, -12.0, 24 * 256 + 1, kDt);
  ra::PullbackReport limit;
  const auto rows = ra::semicontinuity_experiment(m, cs, path, ra::StoppingParams{}, p, {0.25, 1.0 / 64}, &limit);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(limit.sample.size(), 4u);
  EXPECT_LT(rows[1].noise_dist, rows[0].noise_dist);
  for (const auto& r : rows) {
    EXPECT_GE(r.dist, 0.0);
    EXPECT_LT(r.dist, 0.1);
  }
}

TEST(IntervalAudit, RatioIsDnormOverRhs) {
  const auto m = ra::SpectralModel::dirichlet(16);
  ra::CoefficientSpec cs;
  cs.drift = ra::DriftKind::sine;
  cs.drift_scale = 0.08;
  cs.forcing = 0.08;
  cs.diffusion = ra::DiffusionKind::linear;
  cs.channel_scale = {0.08};
  const auto rp = ra::canonical_lift(fbm(0.4, 0.015, 1, 3, 0.0, 8 * 256 + 1, kDt));
  ra::SpectralField y0 = ra::SpectralField::Zero(16);
  y0[0] = 1.0;
  const auto a = ra::interval_audit(m, cs, y0, rp, ra::StoppingParams{}, 0.1, 3);
  ASSERT_EQ(a.times.size(), 4u);
  EXPECT_EQ(a.times[0], 0.0);
  const auto sol = ra::solve_rde(m, cs, y0, rp, a.times[0], a.times[3]);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(a.ratio[i], a.dnorm[i] / a.rhs_unit[i]);
    EXPECT_NEAR(a.dnorm[i], ra::dnorm(m, sol, rp, 0.1, 0.35, a.times[i], a.times[i + 1]).total(), 1e-14);
  }
  // first interval: mu (1 + D_1) + |y0|_gamma
  EXPECT_NEAR(a.rhs_unit[0], 0.1 * (1 + a.dnorm[0]) + std::pow(2.0, 0.05), 1e-14);
}
