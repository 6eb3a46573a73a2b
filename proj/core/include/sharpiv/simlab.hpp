#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sharpiv/data.hpp"
#include "sharpiv/learners.hpp"

namespace sharpiv {

// ---------------------------------------------------------------------------
// Data-generating process: X ~ N(0,1), γ(x) = Φ(b0 + b1 x), C ~ Bern(γ),
// Z ~ Bern(expit x), A = CZ + (1-C)A*, A* ~ Bern(1/2), Y^a ~ Bern(1/2 + (a - 1/2)β).

struct DgpConfig {
  double b0 = 0.0;
  double b1 = 0.0;
  double beta = 0.2;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
};

/// Population quantities for γ(x) = Φ(b0 + b1 x) with X ~ N(0,1).
/// h_q is the upper-μ region {x > x*}; h_0 = 1{γ > 1/2}; h_s ~ Bern(γ).
struct OracleMoments {
  double mu = 0.0;
  double q = 0.0;
  double xi = 0.0;         ///< E[γ h_q]
  double psi = 0.0;
  double e_q = 0.0;        ///< E(h_q)
  double e_s = 0.0;        ///< E(h_s) = 2E(γ - γ²)
  double e_h0 = 0.0;       ///< E(h_0) = E min(γ, 1-γ)
  double length_hq = 0.0;  ///< E[(1-γ) h_q] / E h_q
};

/// Closed forms for μ and q, adaptive quadrature for the rest. b1 < 0 is
/// handled by symmetry (x ↦ -x).
OracleMoments oracle_moments(double b0, double b1);

struct DgpParams {
  double b0 = 0.0;
  double b1 = 0.0;
  double psi = 0.0;  ///< oracle sharpness at (b0, b1)
};

/// (b0, b1) giving strength mu and sharpness psi: bisection on b1 over
/// [e^-2.8, e^5.5] with b0 = Φ⁻¹(μ)√(1 + b1²). psi = 0 gives (Φ⁻¹(μ), 0).
DgpParams solve_dgp_params(double mu, double psi);

/// b0 keeping the strength at mu for a given b1.
double strength_preserving_b0(double mu, double b1);

/// (b1, ψ) along a grid of b1 at fixed strength.
std::vector<std::pair<double, double>> psi_curve(double mu, const std::vector<double>& b1_grid);

/// A draw from the DGP. `data` holds X (column "x") and the latent labels;
/// gamma and the potential outcomes stay here and are never used by estimators.
struct SimulatedData {
  IVDataset data;
  Eigen::VectorXd gamma;
  Eigen::VectorXd y1;
  Eigen::VectorXd y0;

  /// Copy of `data` with the true score appended as a covariate ("x", "gamma").
  [[nodiscard]] IVDataset with_score_covariate() const;
};

SimulatedData simulate_dataset(const DgpConfig& cfg);

// ---------------------------------------------------------------------------
// Monte Carlo harness.

struct MonteCarloConfig {
  double mu = 0.3;
  std::vector<double> psi_list{0.2, 0.5, 0.8};
  double beta = 0.2;
  std::vector<std::size_t> n_list{500, 1000, 5000};
  std::size_t nsim = 500;
  std::uint64_t seed = 2000;
  int folds = 2;
  LearnerSpec learner = LogisticSpec{};
  double level = 0.95;
  unsigned jobs = 1;
};

/// One (ψ, n) cell. Rates and lengths are proportions (not percentages).
struct MonteCarloCell {
  double psi = 0.0;
  std::size_t n = 0;
  double b0 = 0.0;
  double b1 = 0.0;
  double psi_true = 0.0;
  std::size_t replications = 0;
  std::size_t failures = 0;

  double error_h0 = 0.0;
  double error_hq = 0.0;
  double error_hs = 0.0;
  double length_ate = 0.0;
  double length_bhq = 0.0;
  double coverage_ate = 0.0;  ///< Imbens–Manski interval contains β
  double coverage_bhq = 0.0;
  double psi_mean = 0.0;
  double psi_bias = 0.0;
  double psi_sd = 0.0;
  double psi_coverage = 0.0;  ///< logit interval contains ψ
  double mu_mean = 0.0;
};

std::vector<MonteCarloCell> run_monte_carlo(const MonteCarloConfig& cfg);

/// CSV with one row per cell; percentages for rates, lengths, bias and SD.
void save_monte_carlo_csv(const std::vector<MonteCarloCell>& cells, const std::string& path);
std::vector<std::string> monte_carlo_csv_header();

// ---------------------------------------------------------------------------
// First-stage F-statistic demonstration.

struct FstatConfig {
  std::size_t n = 1000;
  std::size_t nsim = 1000;
  std::uint64_t seed = 1000;
  /// Replace both treatment models with A ~ Bern(0.25 Z).
  bool identical = false;
};

struct FstatResult {
  double mean_f_z1 = 0.0;
  double mean_f_z2_nointer = 0.0;
  double mean_f_z2_inter = 0.0;
};

/// X ~ U(0,1), Z ~ Bern(1/2); Z1: A ~ Bern(0.2X + 0.25Z); Z2: A ~ Bern(0.3X + 0.5XZ).
/// Least-squares fits with HC0 covariance; F = Wald statistic / tested terms.
FstatResult first_stage_fstat_demo(const FstatConfig& cfg);

/// HC0 Wald F for the coefficients `tested` in the least-squares fit of y on design.
double hc0_wald_f(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                  const std::vector<Eigen::Index>& tested);

struct FstatOracle {
  double mu_z1 = 0.0;
  double psi_z1 = 0.0;
  double mu_z2 = 0.0;
  double psi_z2 = 0.0;
};

/// Strength and sharpness of the two demonstration instruments.
FstatOracle fstat_oracle();

/// Strength and sharpness for γ(x) = c0 + c1 x with X ~ U(0,1).
std::pair<double, double> linear_uniform_strength_sharpness(double c0, double c1);

// ---------------------------------------------------------------------------
// Margin condition P(|γ - q| ≤ t) ≤ C t^α.

struct MarginCurve {
  std::vector<double> t;
  std::vector<double> prob;
  double q = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  bool degenerate = false;
  Warnings warnings;
};

/// Exact P(|γ - q| ≤ t) for the probit score at each t in t_grid ⊂ (0,1), then
/// fit_margin on the result.
MarginCurve margin_curve(double b0, double b1, const std::vector<double>& t_grid);

/// Same for γ ~ Unif(0,1) with threshold q = 1 - mu.
MarginCurve margin_curve_uniform(double mu, const std::vector<double>& t_grid);

/// Best power-law envelope: α minimises the spread of log P - α log t over the
/// grid (α searched on [0.05, 4] in steps of 0.001), C = max_t P / t^α.
/// A curve that never decreases from 1 is flagged degenerate.
void fit_margin(MarginCurve& curve);

/// Smallest C with P(t) ≤ C t^α over the curve's grid.
double margin_constant(const MarginCurve& curve, double alpha);

/// Evenly spaced grid t_k = tmax k / points, k = 1..points.
std::vector<double> margin_grid(double tmax, std::size_t points);

}  // namespace sharpiv
