#include "sharpiv/classify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sharpiv {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw ValidationError(std::string(what) + " must be finite");
}

struct QuantileSplit {
  double qhat = 0.0;
  bool degenerate = false;
};

// Thresholds `scores` at their empirical (1 - t) quantile, writing into h at `rows`.
QuantileSplit threshold_rows(const Eigen::VectorXd& scores, const std::vector<Eigen::Index>& rows,
                             double t, Eigen::VectorXd& h, Warnings& warnings) {
  Eigen::VectorXd sub(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) sub(static_cast<Eigen::Index>(r)) = scores(rows[r]);

  QuantileSplit out;
  if (sub.maxCoeff() == sub.minCoeff()) {
    out.qhat = sub(0);
    out.degenerate = true;
    for (auto i : rows) h(i) = 0.0;
    warnings.push_back("constant compliance scores: no unique quantile, all units classified 0");
    return out;
  }
  out.qhat = empirical_upper_quantile(sub, t);
  std::size_t selected = 0;
  for (auto i : rows) {
    h(i) = scores(i) > out.qhat ? 1.0 : 0.0;
    selected += h(i) > 0.0;
  }
  if (selected == 0) {
    throw ValidationError("quantile level produces an empty selection");
  }
  if (selected == rows.size()) {
    throw ValidationError("quantile level produces a full selection");
  }
  const double n = static_cast<double>(rows.size());
  const double frac = static_cast<double>(selected) / n;
  if (std::abs(frac - t) > 1.0 / n + 1e-12) {
    std::ostringstream msg;
    msg << "ties at the quantile threshold: selected fraction " << frac << " vs requested " << t;
    warnings.push_back(msg.str());
  }
  return out;
}

void check_level(double t) {
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("quantile level must lie in (0,1)");
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::bayes: return "bayes";
    case ClassifierKind::quantile: return "quantile";
    case ClassifierKind::stochastic: return "stochastic";
    case ClassifierKind::modified_quantile: return "modified";
  }
  return "unknown";
}

ClassifierKind parse_classifier_kind(const std::string& text) {
  if (text == "bayes") return ClassifierKind::bayes;
  if (text == "quantile") return ClassifierKind::quantile;
  if (text == "stochastic") return ClassifierKind::stochastic;
  if (text == "modified" || text == "modified_quantile") return ClassifierKind::modified_quantile;
  throw ValidationError("unknown classifier '" + text + "'");
}

ComplierAssignment bayes_classifier(const Eigen::VectorXd& gamma_hat) {
  require_finite(gamma_hat, "compliance scores");
  ComplierAssignment out;
  out.kind = ClassifierKind::bayes;
  out.h = (gamma_hat.array() > 0.5).cast<double>();
  return out;
}

double empirical_upper_quantile(const Eigen::VectorXd& values, double t) {
  check_level(t);
  if (values.size() == 0) throw ValidationError("quantile of an empty vector");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Guard against n(1-t) landing a hair above an integer through rounding.
  auto index = static_cast<std::ptrdiff_t>(std::ceil(n * (1.0 - t) - 1e-9));
  index = std::clamp<std::ptrdiff_t>(index, 1, static_cast<std::ptrdiff_t>(sorted.size()));
  return sorted[static_cast<std::size_t>(index - 1)];
}

ComplierAssignment quantile_classifier(const Eigen::VectorXd& gamma_hat, double t) {
  check_level(t);
  require_finite(gamma_hat, "compliance scores");
  if (gamma_hat.size() == 0) throw ValidationError("no compliance scores");
  ComplierAssignment out;
  out.kind = ClassifierKind::quantile;
  out.level = t;
  out.h = Eigen::VectorXd::Zero(gamma_hat.size());
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(gamma_hat.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Eigen::Index>(i);
  const auto split = threshold_rows(gamma_hat, rows, t, out.h, out.warnings);
  out.qhat = split.qhat;
  out.degenerate = split.degenerate;
  return out;
}

ComplierAssignment quantile_classifier_by_fold(const Eigen::VectorXd& gamma_hat,
                                               const FoldAssignment& folds, double t) {
  check_level(t);
  require_finite(gamma_hat, "compliance scores");
  if (folds.size() != static_cast<std::size_t>(gamma_hat.size())) {
    throw ValidationError("fold assignment length does not match scores");
  }
  ComplierAssignment out;
  out.kind = ClassifierKind::quantile;
  out.level = t;
  out.h = Eigen::VectorXd::Zero(gamma_hat.size());
  double qsum = 0.0;
  int used = 0;
  for (int b = 1; b <= folds.k; ++b) {
    const auto rows = folds.members(b);
    if (rows.empty()) continue;
    const auto split = threshold_rows(gamma_hat, rows, t, out.h, out.warnings);
    out.fold_qhat.push_back(split.qhat);
    out.degenerate = out.degenerate || split.degenerate;
    qsum += split.qhat;
    ++used;
  }
  out.qhat = qsum / used;
  return out;
}

ComplierAssignment stochastic_classifier(const Eigen::VectorXd& gamma_hat, std::uint64_t seed) {
  require_finite(gamma_hat, "compliance scores");
  ComplierAssignment out;
  out.kind = ClassifierKind::stochastic;
  out.seed = seed;
  out.h.resize(gamma_hat.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < gamma_hat.size(); ++i) {
    out.h(i) = gamma_hat(i) > unif(rng) ? 1.0 : 0.0;
  }
  return out;
}

ComplierAssignment modified_quantile_classifier(const Eigen::VectorXd& gamma_hat, double qhat,
                                                double kappa1, double kappa2) {
  require_finite(gamma_hat, "compliance scores");
  if (kappa1 < 0.0 || kappa2 < 0.0) throw ValidationError("kappa values must be non-negative");
  ComplierAssignment out;
  out.kind = ClassifierKind::modified_quantile;
  out.qhat = qhat;
  out.kappa1 = kappa1;
  out.kappa2 = kappa2;
  const double w = kappa1 + kappa2;
  out.h.resize(gamma_hat.size());
  for (Eigen::Index i = 0; i < gamma_hat.size(); ++i) {
    const double g = gamma_hat(i);
    const double threshold = qhat - w * (g >= 0.5 ? 1.0 : 0.0) + w * (g < 0.5 ? 1.0 : 0.0);
    out.h(i) = g >= threshold ? 1.0 : 0.0;
  }
  return out;
}

double classification_error(const Eigen::VectorXd& gamma, const Eigen::VectorXd& h) {
  if (gamma.size() != h.size() || gamma.size() == 0) {
    throw ValidationError("classification_error: length mismatch");
  }
  return (gamma.array() * (1.0 - h.array()) + (1.0 - gamma.array()) * h.array()).mean();
}

double classification_error(const Eigen::VectorXd& gamma, const ComplierAssignment& h) {
  return classification_error(gamma, h.h);
}

double stochastic_error_expected(const Eigen::VectorXd& gamma, const Eigen::VectorXd& gamma_hat) {
  const Eigen::VectorXd p = gamma_hat.cwiseMax(0.0).cwiseMin(1.0);
  return classification_error(gamma, p);
}

double misclassification_rate(const Eigen::VectorXd& labels, const Eigen::VectorXd& h) {
  if (labels.size() != h.size() || labels.size() == 0) {
    throw ValidationError("misclassification_rate: length mismatch");
  }
  return (labels.array() != h.array()).cast<double>().mean();
}

double quantile_rule_error(const Eigen::VectorXd& gamma, double q) {
  return 2.0 * (gamma.array() * (gamma.array() <= q).cast<double>()).mean();
}

double stochastic_rule_error(const Eigen::VectorXd& gamma) {
  return 2.0 * (gamma.array() - gamma.array().square()).mean();
}

std::pair<double, double> bayes_error_bounds(double e, BayesBoundSource) {
  if (!(e >= 0.0 && e <= 0.5)) {
    throw ValidationError("error rate must lie in [0, 1/2] for the Bayes-error bounds");
  }
  return {(1.0 - std::sqrt(1.0 - 2.0 * e)) / 2.0, e};
}

ErrorReport summarize_errors(const Eigen::VectorXd& gamma_hat, const ComplierAssignment& h,
                             const ComplierAssignment& hq) {
  const Eigen::VectorXd g = gamma_hat.cwiseMax(0.0).cwiseMin(1.0);
  ErrorReport r;
  r.e_hat = h.kind == ClassifierKind::stochastic ? stochastic_error_expected(g, g)
                                                 : classification_error(g, h.h);
  r.e_q = classification_error(g, hq.h);
  r.e_s = stochastic_rule_error(g);
  const auto [lo, hi] = bayes_error_bounds(std::min(r.e_q, 0.5));
  r.bayes_lower = lo;
  r.bayes_upper = hi;
  return r;
}

double complier_characteristic(const Eigen::VectorXd& f_values, const ComplierAssignment& hs) {
  if (f_values.size() != hs.h.size()) throw ValidationError("complier_characteristic: length mismatch");
  const double denom = hs.h.sum();
  if (denom <= 0.0) throw ValidationError("no predicted compliers");
  return f_values.dot(hs.h) / denom;
}

}  // namespace sharpiv
