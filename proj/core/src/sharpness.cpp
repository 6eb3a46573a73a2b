#include "sharpiv/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sharpiv/normal.hpp"
#include "stats.hpp"

namespace sharpiv {

StrengthEstimate estimate_strength(const IVDataset& ds, const NuisanceFit& nf) {
  if (nf.size() != ds.size()) throw ValidationError("dataset and nuisance fit differ in length");
  const Eigen::VectorXd phi = phi_mu(ds, nf);
  StrengthEstimate out;
  out.mu_hat = phi.mean();
  out.se = detail::standard_error(phi);
  out.in_range = out.mu_hat > 0.0 && out.mu_hat < 1.0;
  if (!out.in_range) out.warnings.push_back("strength estimate outside (0,1)");
  return out;
}

namespace {

// Mean of φ̂_μ over units ranked within n_b^{2/3}/2 of the selection cutoff in
// each block, an estimate of γ at the quantile that does not rely on γ̂ being
// calibrated.
double boundary_compliance(const Eigen::VectorXd& phi, const Eigen::VectorXd& score,
                           const Eigen::VectorXd& h, const std::vector<std::vector<Eigen::Index>>& blocks) {
  double sum = 0.0, count = 0.0;
  for (auto idx : blocks) {
    if (idx.empty()) continue;
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return score(a) > score(b); });
    double cut = 0.0;
    for (auto i : idx) cut += h(i);
    const double nb = static_cast<double>(idx.size());
    const double half = std::max(5.0, 0.5 * std::pow(nb, 2.0 / 3.0));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (std::abs(static_cast<double>(r) + 0.5 - cut) <= half) {
        sum += phi(idx[r]);
        count += 1.0;
      }
    }
  }
  return count > 0.0 ? std::clamp(sum / count, 0.0, 1.0) : 0.0;
}

}  // namespace

Eigen::VectorXd sharpness_influence(const Eigen::VectorXd& phi_mu, const Eigen::VectorXd& hq,
                                    double mu, double xi, double q) {
  const double v = mu - mu * mu;
  const double slope = (2.0 * mu * xi - xi - mu * mu) / (v * v);
  return ((phi_mu.cwiseProduct(hq) + q * (phi_mu - hq)).array() - xi).matrix() / v +
         slope * (phi_mu.array() - mu).matrix();
}

SharpnessReport estimate_sharpness(const IVDataset& ds, const NuisanceFit& nf,
                                   const ComplierAssignment& hq, const StrengthEstimate& mu,
                                   double level) {
  if (!(mu.mu_hat > 0.0 && mu.mu_hat < 1.0)) {
    throw ValidationError("strength estimate outside (0,1)");
  }
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  if (hq.h.size() != ds.size()) throw ValidationError("classifier and dataset differ in length");

  SharpnessReport r;
  r.mu_hat = mu.mu_hat;
  r.mu_se = mu.se;
  r.q_hat = hq.qhat;
  r.level = level;
  append_warnings(r.warnings, hq.warnings);

  if (hq.degenerate) {
    r.degenerate = true;
    r.warnings.push_back("degenerate quantile classifier: sharpness reported as 0");
    return r;
  }

  const Eigen::VectorXd phi = phi_mu(ds, nf);
  const double m = r.mu_hat;
  r.xi_hat = phi.dot(hq.h) / static_cast<double>(phi.size());
  r.psi_hat = (r.xi_hat - m * m) / (m * (1.0 - m));
  std::vector<std::vector<Eigen::Index>> blocks;
  if (!hq.fold_qhat.empty() && !nf.in_sample && nf.folds.size() == static_cast<std::size_t>(ds.size())) {
    for (int b = 1; b <= nf.folds.k; ++b) blocks.push_back(nf.folds.members(b));
  } else {
    blocks.emplace_back(static_cast<std::size_t>(ds.size()));
    std::iota(blocks.back().begin(), blocks.back().end(), Eigen::Index{0});
  }
  r.q_boundary = boundary_compliance(phi, nf.gamma, hq.h, blocks);
  r.psi_se = detail::standard_error(sharpness_influence(phi, hq.h, m, r.xi_hat, r.q_boundary));

  const double z = two_sided_critical(level);
  r.wald_ci = {r.psi_hat - z * r.psi_se, r.psi_hat + z * r.psi_se};
  if (r.psi_hat > 0.0 && r.psi_hat < 1.0) {
    const double half = z * r.psi_se / (r.psi_hat * (1.0 - r.psi_hat));
    const double centre = logit(r.psi_hat);
    r.logit_ci = std::make_pair(expit(centre - half), expit(centre + half));
  } else {
    r.warnings.push_back("sharpness estimate outside (0,1): logit interval undefined");
  }
  return r;
}

SharpnessIdentities sharpness_identities(double mu, double psi) {
  return {2.0 * mu * (1.0 - mu) * (1.0 - psi), (1.0 - mu) * (1.0 - psi)};
}

double classifier_error_identity(double mu, double psi_h, double mean_h) {
  return 2.0 * mu * (1.0 - mu) * (1.0 - psi_h) + (1.0 - 2.0 * mu) * (mean_h - mu);
}

double bound_length_identity(double mu, double psi_h, double mean_h) {
  if (!(mean_h > 0.0)) throw ValidationError("empty subgroup");
  return (1.0 - mu) * (1.0 - mu * psi_h / mean_h);
}

double classifier_sharpness(const Eigen::VectorXd& gamma, const Eigen::VectorXd& h) {
  if (gamma.size() != h.size() || gamma.size() == 0) {
    throw ValidationError("classifier_sharpness: length mismatch");
  }
  const double mu = gamma.mean();
  const double eh = h.mean();
  const double denom = mu * (1.0 - mu) * eh * (1.0 - eh);
  if (!(denom > 0.0)) return 0.0;
  const double cov = gamma.dot(h) / static_cast<double>(gamma.size()) - mu * eh;
  return cov / std::sqrt(denom);
}

double youden_index(const Eigen::VectorXd& c, const Eigen::VectorXd& h) {
  if (c.size() != h.size() || c.size() == 0) throw ValidationError("youden_index: length mismatch");
  const double n1 = c.sum();
  const double n0 = static_cast<double>(c.size()) - n1;
  if (n1 <= 0.0 || n0 <= 0.0) throw ValidationError("latent labels contain a single class");
  const double hit1 = c.dot(h);
  const double hit0 = h.sum() - hit1;
  return hit1 / n1 - hit0 / n0;
}

double variance_explained(const Eigen::VectorXd& c, const Eigen::VectorXd& h) {
  if (c.size() != h.size() || c.size() == 0) {
    throw ValidationError("variance_explained: length mismatch");
  }
  const double cm = c.mean();
  const double hm = h.mean();
  const double var = (c.array() - cm).square().mean();
  if (!(var > 0.0)) throw ValidationError("latent labels contain a single class");
  const double cov = ((c.array() - cm) * (h.array() - hm)).mean();
  return cov / var;
}

}  // namespace sharpiv
