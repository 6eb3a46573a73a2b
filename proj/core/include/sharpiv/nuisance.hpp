#pragma once

#include <filesystem>
#include <optional>

#include <Eigen/Core>

#include "sharpiv/data.hpp"
#include "sharpiv/learners.hpp"

namespace sharpiv {

/// Learner choice per nuisance regression. Outcome-type regressions (the four
/// bound outcomes and Y itself) default to the treatment learner.
struct NuisanceLearners {
  LearnerSpec propensity = LogisticSpec{};
  LearnerSpec treatment = LogisticSpec{};
  std::optional<LearnerSpec> outcome;

  static NuisanceLearners uniform(const LearnerSpec& spec) {
    return NuisanceLearners{spec, spec, std::nullopt};
  }
  [[nodiscard]] const LearnerSpec& outcome_or_default() const {
    return outcome ? *outcome : treatment;
  }
};

inline constexpr double kDefaultClipEps = 0.01;

/// Per-unit nuisance predictions. Every entry for unit i comes from models
/// trained only on units outside fold B_i (or on all units for an in-sample fit).
struct NuisanceFit {
  Eigen::VectorXd pi1;      ///< P(Z=1|X), clipped into [eps, 1-eps]
  Eigen::VectorXd lambda0;  ///< P(A=1|X,Z=0)
  Eigen::VectorXd lambda1;  ///< P(A=1|X,Z=1)
  Eigen::VectorXd gamma;    ///< lambda1 - lambda0, unclipped

  // E(V_{j,z} | X, Z=z) for the bound outcomes.
  Eigen::VectorXd nu_u1;
  Eigen::VectorXd nu_u0;
  Eigen::VectorXd nu_l1;
  Eigen::VectorXd nu_l0;

  // E(Y | X, Z=z), used by the LATE estimator.
  Eigen::VectorXd mu_y1;
  Eigen::VectorXd mu_y0;

  FoldAssignment folds;
  double clip_eps = kDefaultClipEps;
  bool in_sample = false;
  Warnings warnings;

  [[nodiscard]] Eigen::Index size() const { return pi1.size(); }
};

/// K-fold cross-fitting: for each fold b, trains every nuisance regression on
/// units with B != b and predicts on fold b. λ_z and the outcome regressions
/// are trained on the Z=z stratum only. Requires y in [0,1].
NuisanceFit fit_crossfit(const IVDataset& ds, const FoldAssignment& folds,
                         const NuisanceLearners& learners, double clip_eps = kDefaultClipEps);

NuisanceFit fit_crossfit(const IVDataset& ds, const FoldAssignment& folds,
                         const LearnerSpec& spec, double clip_eps = kDefaultClipEps);

/// Trains on all units and predicts on all units (no sample splitting).
/// Intended for saturated learners on discrete covariates and for diagnostics.
NuisanceFit fit_in_sample(const IVDataset& ds, const NuisanceLearners& learners,
                          double clip_eps = kDefaultClipEps);

/// Uncentered influence function of E{E(T|X,Z=z)} for one unit:
///   1(Z=z)/π_z (T - E(T|X,Z=z)) + E(T|X,Z=z),   π_0 = 1 - π_1.
double phi_z(int z, double z_obs, double t_value, double t_reg, double pi1);

/// phi_z evaluated for every unit.
Eigen::VectorXd phi_z(int z, const IVDataset& ds, const Eigen::VectorXd& t_value,
                      const Eigen::VectorXd& t_reg, const NuisanceFit& nf);

/// φ_μ = φ_1(A) - φ_0(A) for one unit.
double phi_mu(Eigen::Index i, const IVDataset& ds, const NuisanceFit& nf);

/// φ_μ for every unit.
Eigen::VectorXd phi_mu(const IVDataset& ds, const NuisanceFit& nf);

/// One row per unit: unit, fold, pi1, lambda0, lambda1, gamma, nu_*, mu_y*.
void save_nuisance_csv(const NuisanceFit& nf, const std::filesystem::path& path);

}  // namespace sharpiv
