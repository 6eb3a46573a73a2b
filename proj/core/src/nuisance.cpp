#include "sharpiv/nuisance.hpp"

#include <algorithm>
#include <fstream>

#include "sharpiv/outcomes.hpp"

namespace sharpiv {

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(rows[r]);
  return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Eigen::Index>(r)) = v(rows[r]);
  return out;
}

void scatter(Eigen::VectorXd& into, const std::vector<Eigen::Index>& rows,
             const Eigen::VectorXd& values) {
  for (std::size_t r = 0; r < rows.size(); ++r) into(rows[r]) = values(static_cast<Eigen::Index>(r));
}

std::vector<Eigen::Index> stratum(const IVDataset& ds, const std::vector<Eigen::Index>& rows,
                                  double zval) {
  std::vector<Eigen::Index> out;
  for (auto i : rows) {
    if (ds.z(i) == zval) out.push_back(i);
  }
  return out;
}

void allocate(NuisanceFit& nf, Eigen::Index n) {
  for (auto* v : {&nf.pi1, &nf.lambda0, &nf.lambda1, &nf.gamma, &nf.nu_u1, &nf.nu_u0,
                  &nf.nu_l1, &nf.nu_l0, &nf.mu_y1, &nf.mu_y0}) {
    v->setZero(n);
  }
}

// Trains on `train`, predicts on `test`, writes predictions into nf.
void fit_block(const IVDataset& ds, const TransformedOutcomes& v,
               const std::vector<Eigen::Index>& train, const std::vector<Eigen::Index>& test,
               const NuisanceLearners& learners, NuisanceFit& nf) {
  const auto train0 = stratum(ds, train, 0.0);
  const auto train1 = stratum(ds, train, 1.0);
  if (train0.empty() || train1.empty()) {
    throw ValidationError("degenerate instrument arm: a training fold lacks Z=0 or Z=1 units");
  }
  const Eigen::MatrixXd x_test = take_rows(ds.x, test);
  const Eigen::MatrixXd x0 = take_rows(ds.x, train0);
  const Eigen::MatrixXd x1 = take_rows(ds.x, train1);
  const auto& outcome = learners.outcome_or_default();

  auto fit_predict = [&](const LearnerSpec& spec, const Eigen::MatrixXd& xs,
                         const Eigen::VectorXd& labels, const std::vector<Eigen::Index>& rows,
                         Eigen::VectorXd& into) {
    const auto model = train_learner(spec, xs, take(labels, rows), &nf.warnings);
    scatter(into, test, model.predict(x_test));
  };

  fit_predict(learners.propensity, take_rows(ds.x, train), ds.z, train, nf.pi1);
  fit_predict(learners.treatment, x0, ds.a, train0, nf.lambda0);
  fit_predict(learners.treatment, x1, ds.a, train1, nf.lambda1);
  fit_predict(outcome, x1, v.v_u1, train1, nf.nu_u1);
  fit_predict(outcome, x1, v.v_l1, train1, nf.nu_l1);
  fit_predict(outcome, x0, v.v_u0, train0, nf.nu_u0);
  fit_predict(outcome, x0, v.v_l0, train0, nf.nu_l0);
  fit_predict(outcome, x1, ds.y, train1, nf.mu_y1);
  fit_predict(outcome, x0, ds.y, train0, nf.mu_y0);
}

void finish(NuisanceFit& nf) {
  nf.pi1 = nf.pi1.cwiseMax(nf.clip_eps).cwiseMin(1.0 - nf.clip_eps);
  nf.gamma = nf.lambda1 - nf.lambda0;
  // Warnings repeat per fold; keep one copy of each.
  std::sort(nf.warnings.begin(), nf.warnings.end());
  nf.warnings.erase(std::unique(nf.warnings.begin(), nf.warnings.end()), nf.warnings.end());
}

void check_clip(double clip_eps) {
  if (!(clip_eps > 0.0 && clip_eps < 0.5)) {
    throw ValidationError("clip_eps must lie in (0, 0.5)");
  }
}

}  // namespace

NuisanceFit fit_crossfit(const IVDataset& ds, const FoldAssignment& folds,
                         const NuisanceLearners& learners, double clip_eps) {
  check_clip(clip_eps);
  if (folds.size() != static_cast<std::size_t>(ds.size())) {
    throw ValidationError("fold assignment length does not match dataset");
  }
  if (folds.k < 2) throw ValidationError("cross-fitting needs at least two folds");
  const auto v = transform_outcomes(ds);

  NuisanceFit nf;
  nf.folds = folds;
  nf.clip_eps = clip_eps;
  allocate(nf, ds.size());
  for (int b = 1; b <= folds.k; ++b) {
    const auto test = folds.members(b);
    if (test.empty()) continue;
    fit_block(ds, v, folds.complement(b), test, learners, nf);
  }
  finish(nf);
  return nf;
}

NuisanceFit fit_crossfit(const IVDataset& ds, const FoldAssignment& folds,
                         const LearnerSpec& spec, double clip_eps) {
  return fit_crossfit(ds, folds, NuisanceLearners::uniform(spec), clip_eps);
}

NuisanceFit fit_in_sample(const IVDataset& ds, const NuisanceLearners& learners,
                          double clip_eps) {
  check_clip(clip_eps);
  const auto v = transform_outcomes(ds);
  NuisanceFit nf;
  nf.folds = single_fold(static_cast<std::size_t>(ds.size()));
  nf.clip_eps = clip_eps;
  nf.in_sample = true;
  allocate(nf, ds.size());
  const auto all = nf.folds.members(1);
  fit_block(ds, v, all, all, learners, nf);
  finish(nf);
  return nf;
}

double phi_z(int z, double z_obs, double t_value, double t_reg, double pi1) {
  const double pi_z = z == 1 ? pi1 : 1.0 - pi1;
  const double indicator = z_obs == static_cast<double>(z) ? 1.0 : 0.0;
  return indicator / pi_z * (t_value - t_reg) + t_reg;
}

Eigen::VectorXd phi_z(int z, const IVDataset& ds, const Eigen::VectorXd& t_value,
                      const Eigen::VectorXd& t_reg, const NuisanceFit& nf) {
  Eigen::VectorXd out(ds.size());
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    out(i) = phi_z(z, ds.z(i), t_value(i), t_reg(i), nf.pi1(i));
  }
  return out;
}

double phi_mu(Eigen::Index i, const IVDataset& ds, const NuisanceFit& nf) {
  return phi_z(1, ds.z(i), ds.a(i), nf.lambda1(i), nf.pi1(i)) -
         phi_z(0, ds.z(i), ds.a(i), nf.lambda0(i), nf.pi1(i));
}

Eigen::VectorXd phi_mu(const IVDataset& ds, const NuisanceFit& nf) {
  Eigen::VectorXd out(ds.size());
  for (Eigen::Index i = 0; i < ds.size(); ++i) out(i) = phi_mu(i, ds, nf);
  return out;
}

void save_nuisance_csv(const NuisanceFit& nf, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path.string());
  out << "unit,fold,pi1,lambda0,lambda1,gamma,nu_u1,nu_u0,nu_l1,nu_l0,mu_y1,mu_y0\n";
  for (Eigen::Index i = 0; i < nf.size(); ++i) {
    out << i + 1 << ',' << nf.folds.b[static_cast<std::size_t>(i)];
    for (const auto* v : {&nf.pi1, &nf.lambda0, &nf.lambda1, &nf.gamma, &nf.nu_u1, &nf.nu_u0,
                          &nf.nu_l1, &nf.nu_l0, &nf.mu_y1, &nf.mu_y0}) {
      out << ',' << format_double((*v)(i));
    }
    out << '\n';
  }
}

}  // namespace sharpiv
