#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "sharpiv/classify.hpp"
#include "sharpiv/data.hpp"
#include "sharpiv/nuisance.hpp"
#include "sharpiv/outcomes.hpp"

namespace sharpiv {

/// Estimated bounds [β_l(g), β_u(g)] on the subgroup effect E(Y¹ - Y⁰ | g = 1).
/// Standard errors are for the estimates themselves (already divided by √n).
struct BoundsReport {
  double beta_l = 0.0;
  double beta_u = 0.0;
  double se_l = 0.0;
  double se_u = 0.0;
  std::pair<double, double> im_interval{0.0, 0.0};
  double level = 0.95;
  double subgroup_size = 0.0;  ///< mean(g)
  bool crossed = false;        ///< beta_l > beta_u; reported unclipped
  Warnings warnings;

  [[nodiscard]] double length() const { return beta_u - beta_l; }
};

/// Imbens–Manski interval for a partially identified parameter.
struct ImInterval {
  double lo = 0.0;
  double hi = 0.0;
  double critical = 0.0;  ///< c solving Φ(c + √n Δ / max σ) - Φ(-c) = level
  bool swapped = false;
};

/// [β_l - c σ_l/√n, β_u + c σ_u/√n]. Pass n = 1 when se_l / se_u are already
/// standard errors of the estimates. Crossed inputs are swapped with a flag.
ImInterval imbens_manski_ci(double beta_l, double beta_u, double se_l, double se_u, double n,
                            double level);

/// Cross-fitted bound estimates for the subgroup g:
///   β̂_j = mean[{φ_1(V_{j,1}) - φ_0(V_{j,0})} g] / mean(g).
/// When g is a fold-specific quantile classifier the standard errors use the
/// ĥ_q influence function [Δ_j ĥ_q - β_j φ_μ] / μ̂; otherwise (Δ_j - β_j) g / mean(g).
BoundsReport subgroup_bounds(const IVDataset& ds, const NuisanceFit& nf,
                             const ComplierAssignment& g, double level = 0.95);

/// Bounds on the average treatment effect (g ≡ 1).
BoundsReport ate_bounds(const IVDataset& ds, const NuisanceFit& nf, double level = 0.95);

/// Plug-in bound length mean[(1 - γ) g] / mean(g).
double bound_length(const Eigen::VectorXd& gamma, const Eigen::VectorXd& g);
double bound_length(const Eigen::VectorXd& gamma, const ComplierAssignment& g);

struct LateEstimate {
  double estimate = 0.0;
  double se = 0.0;
};

/// Ratio of influence-function means mean{(φ_1(Y) - φ_0(Y)) g} / mean{φ_μ g},
/// with a delta-method standard error. g defaults to every unit.
LateEstimate estimate_late(const IVDataset& ds, const NuisanceFit& nf,
                           const std::optional<Eigen::VectorXd>& g = std::nullopt);

}  // namespace sharpiv
