#ifndef ROUGH_ATTRACTOR_SPECTRAL_HPP
#define ROUGH_ATTRACTOR_SPECTRAL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "grid.hpp"

namespace rough_attractor {

/** Galerkin coefficients on the sine basis e_k = sqrt(2/pi) sin(k x), k = 1..N. */
using SpectralField = Eigen::VectorXd;

/**
 * Eigen-data of -A on the truncation. rates drive the semigroup S(t) = diag(exp(-rate t));
 * weights are the lambda_k entering the interpolation norms. For the Dirichlet
 * operator both are k^2 + 1; the frozen spectrum keeps the weights but sets all
 * rates to zero (A = 0 surrogate for quadrature checks).
 */
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(std::vector<double> rates, std::vector<double> weights)
      : rates_(Eigen::Map<const Eigen::VectorXd>(rates.data(), static_cast<Eigen::Index>(rates.size()))),
        weights_(Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))) {
    if (rates.size() != weights.size() || rates.empty())
      throw DomainError("Spectrum: rates and weights must be non-empty and of equal length");
    if (weights_.minCoeff() <= 0.0) throw DomainError("Spectrum: weights must be positive");
    if (rates_.minCoeff() < 0.0) throw DomainError("Spectrum: rates must be nonnegative");
  }

  static Spectrum dirichlet(std::size_t n_modes) {
    if (n_modes == 0) throw DomainError("Spectrum: need at least one mode");
    std::vector<double> lam(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) lam[k] = static_cast<double>((k + 1) * (k + 1)) + 1.0;
    return Spectrum(lam, lam);
  }

  static Spectrum frozen(std::size_t n_modes) {
    Spectrum s = dirichlet(n_modes);
    s.rates_.setZero();
    return s;
  }

  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  const Eigen::VectorXd& rates() const { return rates_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /** Smallest decay rate (lambda = 2 for the Dirichlet operator). */
  double lambda() const { return rates_.minCoeff(); }

  /** lambda_k^gamma, cached per exponent by callers. */
  Eigen::VectorXd weight_pow(double gamma) const {
    return weights_.array().pow(gamma).matrix();
  }

 private:
  Eigen::VectorXd rates_, weights_;
};

inline SpectralField semigroup_apply(const Spectrum& sp, const SpectralField& x, double t) {
  if (t < 0.0) throw DomainError("semigroup_apply: t must be >= 0");
  if (static_cast<std::size_t>(x.size()) != sp.size())
    throw DomainError("semigroup_apply: field size does not match the truncation");
  return ((-t * sp.rates().array()).exp() * x.array()).matrix();
}

/** ||x||_gamma = (sum lambda_k^gamma x_k^2)^(1/2). */
inline double interp_norm(const Spectrum& sp, const SpectralField& x, double gamma) {
  if (static_cast<std::size_t>(x.size()) != sp.size())
    throw DomainError("interp_norm: field size does not match the truncation");
  return std::sqrt((sp.weights().array().pow(gamma) * x.array().square()).sum());
}

/** Spectrum plus the orthogonal sine transform used by pointwise (Nemytskii) drifts. */
class SpectralModel {
 public:
  SpectralModel() = default;
  SpectralModel(Spectrum spectrum) : spectrum_(std::move(spectrum)) {
    const std::size_t n = spectrum_.size();
    // Orthogonal DST-I on the nodes x_j = j pi / (n + 1): u(x_j) = sqrt(2/pi) sum_k c_k sin(k x_j).
    synth_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        synth_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            std::sqrt(2.0 / std::numbers::pi) *
            std::sin(static_cast<double>((j + 1) * (k + 1)) * std::numbers::pi / static_cast<double>(n + 1));
    // sin matrix S satisfies S^2 = (n+1)/2 I
    analysis_ = synth_.transpose() * (std::numbers::pi / static_cast<double>(n + 1));
  }

  static SpectralModel dirichlet(std::size_t n_modes) { return SpectralModel(Spectrum::dirichlet(n_modes)); }

  const Spectrum& spectrum() const { return spectrum_; }
  std::size_t size() const { return spectrum_.size(); }
  /** Nodal values at x_j = j pi / (N+1). */
  Eigen::VectorXd to_values(const SpectralField& c) const { return synth_ * c; }
  SpectralField to_coeffs(const Eigen::VectorXd& u) const { return analysis_ * u; }

 private:
  Spectrum spectrum_;
  Eigen::MatrixXd synth_, analysis_;
};

enum class DriftKind { zero, linear, sine };
enum class DiffusionKind { zero, linear, additive };

/**
 * Coefficients of dy = (Ay + F(y)) dt + G(y) dW.
 *   drift  zero:   F = forcing e_1
 *          linear: F(y) = -drift_scale y + forcing e_1
 *          sine:   F(y) = drift_scale sin(y(x)) + forcing e_1 (pseudo-spectral on the nodes)
 *   diffusion linear:   G_j(y) = c_j (-A)^(sigma/2) y
 *             additive: G_j(y) = c_j e_1
 */
struct CoefficientSpec {
  DriftKind drift = DriftKind::zero;
  double drift_scale = 0.0;
  double forcing = 0.0;
  DiffusionKind diffusion = DiffusionKind::zero;
  std::vector<double> channel_scale;
  double sigma = 0.05;
  double delta = 0.25;
  double gamma = 0.1;

  std::size_t channels() const { return channel_scale.size(); }

  double max_channel() const {
    double c = 0.0;
    for (double v : channel_scale) c = std::max(c, std::abs(v));
    return c;
  }
};

/** Lipschitz constant of F from B_gamma to B_{gamma - delta} (upper bound). */
inline double drift_lipschitz(const SpectralModel& m, const CoefficientSpec& cs) {
  if (cs.drift == DriftKind::zero) return 0.0;
  const double lam1 = m.spectrum().weights().minCoeff();
  // ||u||_{gamma-delta} <= lam1^{-delta/2} ||u||_gamma for diagonal maps; for the
  // Nemytskii map use ||.||_{gamma-delta} <= ||.||_0 <= ||.||_gamma (needs gamma <= delta)
  if (cs.drift == DriftKind::linear) return std::abs(cs.drift_scale) * std::pow(lam1, -cs.delta / 2.0);
  return std::abs(cs.drift_scale);
}

inline double drift_at_zero(const SpectralModel& m, const CoefficientSpec& cs) {
  const double lam1 = m.spectrum().weights()[0];
  return std::abs(cs.forcing) * std::pow(lam1, (cs.gamma - cs.delta) / 2.0);
}

/** Constant bounding G and its derivatives between the B-scale spaces used by the solver. */
inline double diffusion_constant(const SpectralModel& m, const CoefficientSpec& cs, double alpha) {
  if (cs.diffusion == DiffusionKind::zero) return 0.0;
  const double c = cs.max_channel();
  const double lam1 = m.spectrum().weights().minCoeff();
  // linear: |G_j(y)|_{gamma-sigma} = c_j |y|_gamma and |DG_j G_i(y)|_{gamma-2alpha-sigma} <= c^2 |y|_{gamma-alpha}
  if (cs.diffusion == DiffusionKind::linear) return std::max(c, c * c * std::pow(lam1, (cs.sigma - alpha) / 2.0));
  return c * std::pow(lam1, (cs.gamma - cs.sigma) / 2.0);
}

/** Violated coefficient constraints for the given mu and alpha (empty when valid). */
inline std::vector<std::string> coefficient_violations(const SpectralModel& m, const CoefficientSpec& cs,
                                                       double mu, double alpha) {
  std::vector<std::string> out;
  if (!(cs.sigma >= 0.0 && cs.sigma < alpha)) out.push_back("sigma in [0, alpha)");
  if (!(cs.delta >= 0.0 && cs.delta < 1.0)) out.push_back("delta in [0, 1)");
  if (!(cs.gamma > 0.0)) out.push_back("gamma > 0");
  if (!(cs.gamma < std::min(alpha - cs.sigma, 1.0 - cs.delta)))
    out.push_back("gamma < min(alpha - sigma, 1 - delta)");
  if (cs.drift == DriftKind::sine && cs.gamma > cs.delta) out.push_back("gamma <= delta for sine drift");
  if (drift_lipschitz(m, cs) > mu) out.push_back("lipschitz(F) <= mu");
  if (drift_at_zero(m, cs) > mu) out.push_back("|F(0)|_{gamma-delta} <= mu");
  if (diffusion_constant(m, cs, alpha) > mu) out.push_back("C_G <= mu");
  return out;
}

inline SpectralField apply_F(const SpectralModel& m, const CoefficientSpec& cs, const SpectralField& x) {
  SpectralField out;
  switch (cs.drift) {
    case DriftKind::zero:
      out = SpectralField::Zero(x.size());
      break;
    case DriftKind::linear:
      out = -cs.drift_scale * x;
      break;
    case DriftKind::sine:
      out = cs.drift_scale * m.to_coeffs(m.to_values(x).array().sin().matrix());
      break;
  }
  out[0] += cs.forcing;
  return out;
}

/**
 * Drift and rough-noise increment over one step:
 *   sum_j G_j(y) w^j + sum_{i,j} DG_j(y)[G_i(y)] a^{ij}
 * with w the increment and a the d x d area (row-major).
 */
class NoiseOperator {
 public:
  NoiseOperator(const SpectralModel& m, const CoefficientSpec& cs) : cs_(cs) {
    lsig_ = m.spectrum().weights().array().pow(cs.sigma / 2.0).matrix();
    lsig2_ = lsig_.array().square().matrix();
    e1_ = SpectralField::Zero(static_cast<Eigen::Index>(m.size()));
    e1_[0] = 1.0;
  }

  std::size_t channels() const { return cs_.channels(); }

  /** Channel field G_j(y). */
  SpectralField channel(const SpectralField& y, std::size_t j) const {
    switch (cs_.diffusion) {
      case DiffusionKind::linear:
        return cs_.channel_scale[j] * lsig_.cwiseProduct(y);
      case DiffusionKind::additive:
        return cs_.channel_scale[j] * e1_;
      default:
        return SpectralField::Zero(y.size());
    }
  }

  /** DG_j(y)[G_i(y)]. */
  SpectralField second(const SpectralField& y, std::size_t i, std::size_t j) const {
    if (cs_.diffusion != DiffusionKind::linear) return SpectralField::Zero(y.size());
    return cs_.channel_scale[i] * cs_.channel_scale[j] * lsig2_.cwiseProduct(y);
  }

  /** sum_j G_j(y) w^j + sum_{ij} DG_j G_i a^{ij}. */
  SpectralField step(const SpectralField& y, const double* w, const double* a) const {
    const std::size_t d = channels();
    if (cs_.diffusion == DiffusionKind::zero || d == 0) return SpectralField::Zero(y.size());
    double s1 = 0.0;
    for (std::size_t j = 0; j < d; ++j) s1 += cs_.channel_scale[j] * w[j];
    if (cs_.diffusion == DiffusionKind::additive) return s1 * e1_;
    double s2 = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s2 += cs_.channel_scale[i] * cs_.channel_scale[j] * a[i * d + j];
    return (s1 * lsig_.array() + s2 * lsig2_.array()).matrix().cwiseProduct(y);
  }

 private:
  CoefficientSpec cs_;
  SpectralField lsig_, lsig2_, e1_;
};

/** Fitted C in sup_k lambda_k^sigma e^{-lambda_k t} <= C t^{-sigma} e^{-lambda t} over a t ladder. */
inline double smoothing_constant(const Spectrum& sp, double sigma, const std::vector<double>& ts) {
  if (!(sigma >= 0.0)) throw DomainError("smoothing_constant: sigma must be >= 0");
  const double lam = sp.lambda();
  double c = 0.0;
  for (double t : ts) {
    if (!(t > 0.0)) throw DomainError("smoothing_constant: t must be positive");
    for (Eigen::Index k = 0; k < sp.weights().size(); ++k) {
      const double v = std::pow(sp.weights()[k], sigma) * std::exp(-(sp.rates()[k] - lam) * t);
      c = std::max(c, v * std::pow(t, sigma));
    }
  }
  return c;
}

/** Fitted C in sup_k (1 - e^{-lambda_k t}) / (t^sigma lambda_k^sigma) <= C over a t ladder. */
inline double continuity_constant(const Spectrum& sp, double sigma, const std::vector<double>& ts) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw DomainError("continuity_constant: sigma must lie in [0, 1]");
  double c = 0.0;
  for (double t : ts) {
    if (!(t > 0.0)) throw DomainError("continuity_constant: t must be positive");
    for (Eigen::Index k = 0; k < sp.weights().size(); ++k) {
      const double v = -std::expm1(-sp.rates()[k] * t) / (std::pow(t, sigma) * std::pow(sp.weights()[k], sigma));
      c = std::max(c, v);
    }
  }
  return c;
}

/** Writes a field as CSV rows k,coeff with k starting at 1. */
inline void write_field_csv(const SpectralField& x, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file);
  out << "k,coeff\n";
  char buf[64];
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", x[k]);
    out << (k + 1) << ',' << buf << "\n";
  }
}

}  // namespace rough_attractor

#endif
