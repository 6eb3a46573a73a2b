#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "sharpiv/classify.hpp"
#include "sharpiv/data.hpp"
#include "sharpiv/nuisance.hpp"

namespace sharpiv {

/// μ̂ = mean φ̂_μ with standard error sd(φ̂_μ)/√n.
struct StrengthEstimate {
  double mu_hat = 0.0;
  double se = 0.0;
  bool in_range = true;  ///< 0 < μ̂ < 1
  Warnings warnings;
};

StrengthEstimate estimate_strength(const IVDataset& ds, const NuisanceFit& nf);

/// Sharpness of the quantile classifier, corr(C, h_q).
/// psi_se and mu_se are standard errors of the estimates.
struct SharpnessReport {
  double mu_hat = 0.0;
  double mu_se = 0.0;
  double xi_hat = 0.0;  ///< mean(φ̂_μ ĥ_q)
  double q_hat = 0.0;       ///< pooled classifier threshold
  double q_boundary = 0.0;  ///< γ at the cutoff (local mean of φ̂_μ), used in the variance
  double psi_hat = 0.0;
  double psi_se = 0.0;
  double level = 0.95;
  std::pair<double, double> wald_ci{0.0, 0.0};
  std::optional<std::pair<double, double>> logit_ci;  ///< empty when ψ̂ ∉ (0,1)
  bool degenerate = false;
  Warnings warnings;
};

/// ψ̂ = (ξ̂ - μ̂²) / (μ̂(1 - μ̂)). `hq` should be the fold-specific quantile
/// classifier at level μ̂. Throws ValidationError unless 0 < μ̂ < 1.
SharpnessReport estimate_sharpness(const IVDataset& ds, const NuisanceFit& nf,
                                   const ComplierAssignment& hq, const StrengthEstimate& mu,
                                   double level = 0.95);

/// Per-unit influence function of ψ evaluated at the supplied estimates.
Eigen::VectorXd sharpness_influence(const Eigen::VectorXd& phi_mu, const Eigen::VectorXd& hq,
                                    double mu, double xi, double q);

struct SharpnessIdentities {
  double error_hq = 0.0;   ///< 2μ(1-μ)(1-ψ)
  double length_hq = 0.0;  ///< (1-μ)(1-ψ)
};

SharpnessIdentities sharpness_identities(double mu, double psi);

/// For an arbitrary classifier with mean e_h = E h and sharpness psi_h:
/// E(h) = 2μ(1-μ)(1-ψ) + (1-2μ)(E h - μ).
double classifier_error_identity(double mu, double psi_h, double mean_h);
/// ℓ(h) = (1-μ){1 - μψ(h)/E h}.
double bound_length_identity(double mu, double psi_h, double mean_h);

/// corr(C, h) under the empirical distribution of the scores:
/// (E[γh] - μ E h) / √(μ(1-μ) E h (1 - E h)).
double classifier_sharpness(const Eigen::VectorXd& gamma, const Eigen::VectorXd& h);

/// P̂(h=1 | C=1) - P̂(h=1 | C=0). Throws if c holds a single class.
double youden_index(const Eigen::VectorXd& c, const Eigen::VectorXd& h);

/// Empirical cov(c, h) / var(c).
double variance_explained(const Eigen::VectorXd& c, const Eigen::VectorXd& h);

}  // namespace sharpiv
