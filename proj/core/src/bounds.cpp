#include "sharpiv/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "sharpiv/normal.hpp"
#include "stats.hpp"

namespace sharpiv {

namespace {

void check_sizes(const IVDataset& ds, const NuisanceFit& nf, Eigen::Index g_size) {
  if (nf.size() != ds.size() || g_size != ds.size()) {
    throw ValidationError("dataset, nuisance fit and subgroup differ in length");
  }
}

BoundsReport compute_bounds(const IVDataset& ds, const NuisanceFit& nf, const Eigen::VectorXd& g,
                            bool quantile_subgroup, double level) {
  check_sizes(ds, nf, g.size());
  const double size = g.mean();
  if (!(size > 0.0)) throw ValidationError("empty subgroup");

  const auto v = transform_outcomes(ds);
  const Eigen::VectorXd delta_u = phi_z(1, ds, v.v_u1, nf.nu_u1, nf) - phi_z(0, ds, v.v_u0, nf.nu_u0, nf);
  const Eigen::VectorXd delta_l = phi_z(1, ds, v.v_l1, nf.nu_l1, nf) - phi_z(0, ds, v.v_l0, nf.nu_l0, nf);

  BoundsReport r;
  r.level = level;
  r.subgroup_size = size;
  r.beta_u = delta_u.dot(g) / static_cast<double>(g.size()) / size;
  r.beta_l = delta_l.dot(g) / static_cast<double>(g.size()) / size;

  auto influence = [&](const Eigen::VectorXd& delta, double beta) -> Eigen::VectorXd {
    if (quantile_subgroup) {
      const Eigen::VectorXd phi = phi_mu(ds, nf);
      const double mu_hat = phi.mean();
      return (delta.cwiseProduct(g) - beta * phi) / mu_hat;
    }
    return (delta.array() - beta).matrix().cwiseProduct(g) / size;
  };
  r.se_u = detail::standard_error(influence(delta_u, r.beta_u));
  r.se_l = detail::standard_error(influence(delta_l, r.beta_l));

  if (r.beta_l > r.beta_u) {
    r.crossed = true;
    r.warnings.push_back("estimated bounds cross (beta_l > beta_u); reported unclipped");
  }
  if (r.se_l > 0.0 && r.se_u > 0.0) {
    const auto im = imbens_manski_ci(r.beta_l, r.beta_u, r.se_l, r.se_u, 1.0, level);
    r.im_interval = {im.lo, im.hi};
  } else {
    r.im_interval = {std::min(r.beta_l, r.beta_u), std::max(r.beta_l, r.beta_u)};
    r.warnings.push_back("zero standard error: confidence interval equals the bounds");
  }
  return r;
}

}  // namespace

ImInterval imbens_manski_ci(double beta_l, double beta_u, double se_l, double se_u, double n,
                            double level) {
  if (!(se_l > 0.0 && se_u > 0.0)) throw ValidationError("standard errors must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  if (!(n > 0.0)) throw ValidationError("sample count must be positive");
  ImInterval out;
  if (beta_l > beta_u) {
    std::swap(beta_l, beta_u);
    std::swap(se_l, se_u);
    out.swapped = true;
  }
  const double root_n = std::sqrt(n);
  const double shift = root_n * (beta_u - beta_l) / std::max(se_l, se_u);
  auto excess = [&](double c) { return normal_cdf(c + shift) - normal_cdf(-c) - level; };

  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e3) throw NumericalError("Imbens-Manski critical value: bracket not found");
  }
  if (excess(lo) > 0.0) {
    // level below what c = 0 already delivers; the interval is the bounds themselves.
    hi = 0.0;
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  out.critical = hi;
  out.lo = beta_l - out.critical * se_l / root_n;
  out.hi = beta_u + out.critical * se_u / root_n;
  return out;
}

BoundsReport subgroup_bounds(const IVDataset& ds, const NuisanceFit& nf,
                             const ComplierAssignment& g, double level) {
  const bool quantile_subgroup = g.kind == ClassifierKind::quantile && !g.fold_qhat.empty();
  auto r = compute_bounds(ds, nf, g.h, quantile_subgroup, level);
  append_warnings(r.warnings, g.warnings);
  return r;
}

BoundsReport ate_bounds(const IVDataset& ds, const NuisanceFit& nf, double level) {
  return compute_bounds(ds, nf, Eigen::VectorXd::Ones(ds.size()), false, level);
}

double bound_length(const Eigen::VectorXd& gamma, const Eigen::VectorXd& g) {
  if (gamma.size() != g.size()) throw ValidationError("bound_length: length mismatch");
  const double size = g.sum();
  if (!(size > 0.0)) throw ValidationError("empty subgroup");
  return (1.0 - gamma.array()).matrix().dot(g) / size;
}

double bound_length(const Eigen::VectorXd& gamma, const ComplierAssignment& g) {
  return bound_length(gamma, g.h);
}

LateEstimate estimate_late(const IVDataset& ds, const NuisanceFit& nf,
                           const std::optional<Eigen::VectorXd>& g) {
  const Eigen::VectorXd weights = g ? *g : Eigen::VectorXd::Ones(ds.size());
  check_sizes(ds, nf, weights.size());
  const Eigen::VectorXd num =
      (phi_z(1, ds, ds.y, nf.mu_y1, nf) - phi_z(0, ds, ds.y, nf.mu_y0, nf)).cwiseProduct(weights);
  const Eigen::VectorXd den = phi_mu(ds, nf).cwiseProduct(weights);
  const double d = den.mean();
  if (std::abs(d) <= 1e-6) throw ValidationError("instrument too weak in subgroup");
  LateEstimate out;
  out.estimate = num.mean() / d;
  out.se = detail::standard_error((num - out.estimate * den) / d);
  return out;
}

}  // namespace sharpiv
