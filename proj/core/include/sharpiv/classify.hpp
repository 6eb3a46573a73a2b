#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sharpiv/data.hpp"
#include "sharpiv/error.hpp"

namespace sharpiv {

enum class ClassifierKind { bayes, quantile, stochastic, modified_quantile };

std::string to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(const std::string& text);

/// Per-unit complier predictions plus the parameters that produced them.
struct ComplierAssignment {
  Eigen::VectorXd h;  ///< 0/1
  ClassifierKind kind = ClassifierKind::bayes;

  // quantile / modified_quantile
  double level = 0.0;            ///< requested selection fraction t
  double qhat = 0.0;             ///< threshold (pooled mean of fold thresholds when split)
  std::vector<double> fold_qhat; ///< q̂_{-b} per fold, empty when not fold-specific
  double kappa1 = 0.0;
  double kappa2 = 0.0;

  // stochastic
  std::uint64_t seed = 0;

  bool degenerate = false;  ///< no unique quantile (e.g. constant scores)
  Warnings warnings;

  [[nodiscard]] Eigen::Index size() const { return h.size(); }
  [[nodiscard]] double selected_fraction() const { return h.size() ? h.mean() : 0.0; }
};

/// h_i = 1{γ̂_i > 1/2}; a tie at exactly 1/2 is classified 0.
ComplierAssignment bayes_classifier(const Eigen::VectorXd& gamma_hat);

/// Empirical (1 - t) quantile: the order statistic at 1-based index ⌈n(1-t)⌉.
double empirical_upper_quantile(const Eigen::VectorXd& values, double t);

/// h_i = 1{γ̂_i > q̂}, q̂ = empirical_upper_quantile(γ̂, t). Constant scores give
/// all zeros with a degeneracy warning; an empty selection otherwise throws.
ComplierAssignment quantile_classifier(const Eigen::VectorXd& gamma_hat, double t);

/// Fold-specific version: within each fold b, q̂_{-b} is the (1 - t) quantile
/// of the fold's out-of-fold scores.
ComplierAssignment quantile_classifier_by_fold(const Eigen::VectorXd& gamma_hat,
                                               const FoldAssignment& folds, double t);

/// h_i = 1{γ̂_i > U_i}, U_i ~ Unif[0,1) from a generator seeded with `seed`.
ComplierAssignment stochastic_classifier(const Eigen::VectorXd& gamma_hat, std::uint64_t seed);

/// h = 1{γ̂ ≥ q̂ - w 1(γ̂ ≥ 1/2) + w 1(γ̂ < 1/2)}, w = κ1 + κ2: agrees with the
/// plug-in Bayes rule inside a window of width w around q̂.
ComplierAssignment modified_quantile_classifier(const Eigen::VectorXd& gamma_hat, double qhat,
                                                double kappa1, double kappa2);

/// Identified error mean[γ(1-h) + (1-γ)h].
double classification_error(const Eigen::VectorXd& gamma, const Eigen::VectorXd& h);
double classification_error(const Eigen::VectorXd& gamma, const ComplierAssignment& h);

/// Error of the stochastic rule averaged over its randomisation:
/// mean[γ(1-γ̂) + (1-γ)γ̂].
double stochastic_error_expected(const Eigen::VectorXd& gamma, const Eigen::VectorXd& gamma_hat);

/// Empirical misclassification rate against known labels (simulation only).
double misclassification_rate(const Eigen::VectorXd& labels, const Eigen::VectorXd& h);

/// 2 mean[γ 1{γ ≤ q}].
double quantile_rule_error(const Eigen::VectorXd& gamma, double q);
/// 2 mean[γ - γ²].
double stochastic_rule_error(const Eigen::VectorXd& gamma);

enum class BayesBoundSource { from_quantile_error, from_stochastic_error };

/// Sandwich for the Bayes error from E_q or E_s: [(1 - √(1-2e))/2, e].
/// Throws for e outside [0, 1/2].
std::pair<double, double> bayes_error_bounds(double e,
                                             BayesBoundSource which = BayesBoundSource::from_quantile_error);

struct ErrorReport {
  double e_hat = 0.0;  ///< error of the chosen classifier
  double e_q = 0.0;
  double e_s = 0.0;
  double bayes_lower = 0.0;
  double bayes_upper = 0.0;
};

/// Plug-in error summary from estimated scores (clamped to [0,1]); the Bayes
/// sandwich comes from E_q.
ErrorReport summarize_errors(const Eigen::VectorXd& gamma_hat, const ComplierAssignment& h,
                             const ComplierAssignment& hq);

/// θ̂ = mean(f h) / mean(h) over predicted compliers.
double complier_characteristic(const Eigen::VectorXd& f_values, const ComplierAssignment& hs);

}  // namespace sharpiv
