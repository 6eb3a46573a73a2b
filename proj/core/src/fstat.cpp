#include <random>

#include <Eigen/Dense>

#include "sharpiv/simlab.hpp"

namespace sharpiv {

double hc0_wald_f(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                  const std::vector<Eigen::Index>& tested) {
  if (design.rows() != y.size() || tested.empty()) throw ValidationError("hc0_wald_f: bad inputs");
  const Eigen::MatrixXd xtx = design.transpose() * design;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  if (ldlt.info() != Eigen::Success) throw NumericalError("hc0_wald_f: singular design");
  const Eigen::MatrixXd bread = ldlt.solve(Eigen::MatrixXd::Identity(xtx.rows(), xtx.cols()));
  const Eigen::VectorXd coef = bread * (design.transpose() * y);
  const Eigen::VectorXd resid = y - design * coef;
  const Eigen::MatrixXd meat = design.transpose() * resid.array().square().matrix().asDiagonal() * design;
  const Eigen::MatrixXd cov = bread * meat * bread;

  const auto k = static_cast<Eigen::Index>(tested.size());
  Eigen::VectorXd b(k);
  Eigen::MatrixXd v(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    b(i) = coef(tested[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) {
      v(i, j) = cov(tested[static_cast<std::size_t>(i)], tested[static_cast<std::size_t>(j)]);
    }
  }
  const double wald = b.dot(v.ldlt().solve(b));
  return wald / static_cast<double>(k);
}

FstatResult first_stage_fstat_demo(const FstatConfig& cfg) {
  if (cfg.n < 5 || cfg.nsim == 0) throw ValidationError("fstat demo needs n >= 5 and nsim >= 1");
  const auto n = static_cast<Eigen::Index>(cfg.n);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto bern = [&](double p) { return unif(rng) < p ? 1.0 : 0.0; };

  FstatResult out;
  Eigen::MatrixXd main_design(n, 3);
  Eigen::MatrixXd inter_design(n, 4);
  Eigen::VectorXd a(n);
  for (std::size_t rep = 0; rep < cfg.nsim; ++rep) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = unif(rng);
      const double z = bern(0.5);
      main_design.row(i) << 1.0, x, z;
      inter_design.row(i) << 1.0, x, z, x * z;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = main_design(i, 1);
      const double z = main_design(i, 2);
      a(i) = bern(cfg.identical ? 0.25 * z : 0.2 * x + 0.25 * z);
    }
    out.mean_f_z1 += hc0_wald_f(main_design, a, {2});
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = main_design(i, 1);
      const double z = main_design(i, 2);
      a(i) = bern(cfg.identical ? 0.25 * z : 0.3 * x + 0.5 * x * z);
    }
    out.mean_f_z2_nointer += hc0_wald_f(main_design, a, {2});
    out.mean_f_z2_inter += hc0_wald_f(inter_design, a, {2, 3});
  }
  const double k = static_cast<double>(cfg.nsim);
  out.mean_f_z1 /= k;
  out.mean_f_z2_nointer /= k;
  out.mean_f_z2_inter /= k;
  return out;
}

std::pair<double, double> linear_uniform_strength_sharpness(double c0, double c1) {
  const double mu = c0 + c1 / 2.0;
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("strength must lie in (0,1)");
  if (c1 == 0.0) return {mu, 0.0};
  // h_q selects the upper-μ region of x when c1 > 0, the lower region otherwise.
  const double xi = c1 > 0.0 ? c0 * mu + c1 * (1.0 - (1.0 - mu) * (1.0 - mu)) / 2.0
                             : c0 * mu + c1 * mu * mu / 2.0;
  return {mu, (xi - mu * mu) / (mu - mu * mu)};
}

FstatOracle fstat_oracle() {
  const auto [mu1, psi1] = linear_uniform_strength_sharpness(0.25, 0.0);
  const auto [mu2, psi2] = linear_uniform_strength_sharpness(0.0, 0.5);
  return {mu1, psi1, mu2, psi2};
}

}  // namespace sharpiv
