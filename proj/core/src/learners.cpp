#include "sharpiv/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "sharpiv/normal.hpp"

namespace sharpiv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kEtaClamp = 30.0;

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y(i);
    const double pi = std::clamp(p(i), 1e-300, 1.0 - 1e-16);
    if (yi > 0.0) dev += yi * std::log(yi / pi);
    if (yi < 1.0) dev += (1.0 - yi) * std::log((1.0 - yi) / (1.0 - pi));
  }
  return 2.0 * dev;
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& design, const Eigen::VectorXd& coef) {
  return (design * coef).cwiseMax(-kEtaClamp).cwiseMin(kEtaClamp);
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& features) {
  Eigen::MatrixXd design(features.rows(), features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(features.cols()) = features;
  return design;
}

std::optional<Eigen::VectorXd> solve_weighted(const Eigen::MatrixXd& design,
                                              const Eigen::VectorXd& w,
                                              const Eigen::VectorXd& working) {
  const Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
  Eigen::MatrixXd gram = xtw * design;
  const Eigen::VectorXd rhs = xtw * working;
  for (double ridge : {0.0, 1e-8}) {
    if (ridge > 0.0) gram.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd sol = llt.solve(rhs);
      if (sol.allFinite()) return sol;
    }
  }
  return std::nullopt;
}

std::optional<LogisticModel> fit_logistic(const LogisticSpec& spec, const Eigen::MatrixXd& features,
                                          const Eigen::VectorXd& labels) {
  const Eigen::MatrixXd design = with_intercept(features);
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(design.cols());
  coef(0) = logit(std::clamp(labels.mean(), 0.01, 0.99));

  Eigen::VectorXd eta = linear_predictor(design, coef);
  Eigen::VectorXd p = eta.unaryExpr([](double e) { return expit(e); });
  double dev = binomial_deviance(labels, p);

  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).cwiseMax(1e-12);
    const Eigen::VectorXd working = eta.array() + (labels - p).array() / w.array();
    auto next = solve_weighted(design, w, working);
    if (!next) return std::nullopt;

    // Step-halving guards against overshooting from poor starts.
    Eigen::VectorXd candidate = *next;
    double candidate_dev = 0.0;
    Eigen::VectorXd candidate_eta, candidate_p;
    for (int half = 0; half < 20; ++half) {
      candidate_eta = linear_predictor(design, candidate);
      candidate_p = candidate_eta.unaryExpr([](double e) { return expit(e); });
      candidate_dev = binomial_deviance(labels, candidate_p);
      if (std::isfinite(candidate_dev) && candidate_dev <= dev * (1.0 + 1e-12) + 1e-12) break;
      candidate = 0.5 * (candidate + coef);
    }

    const double change = std::abs(candidate_dev - dev) / (std::abs(candidate_dev) + 0.1);
    coef = std::move(candidate);
    eta = std::move(candidate_eta);
    p = std::move(candidate_p);
    dev = candidate_dev;
    if (change < spec.tolerance) return LogisticModel{coef};
  }
  return std::nullopt;
}

KnnModel fit_knn(const KnnSpec& spec, const Eigen::MatrixXd& features,
                 const Eigen::VectorXd& labels) {
  return KnnModel{spec.k, features, labels};
}

CellMeanModel fit_cells(const Eigen::MatrixXd& features, const Eigen::VectorXd& labels) {
  std::map<std::vector<double>, std::pair<double, double>> acc;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    std::vector<double> key(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index j = 0; j < features.cols(); ++j) key[static_cast<std::size_t>(j)] = features(i, j);
    auto& [sum, count] = acc[key];
    sum += labels(i);
    count += 1.0;
  }
  CellMeanModel model;
  model.fallback = labels.mean();
  for (const auto& [key, sc] : acc) model.cells.emplace(key, sc.first / sc.second);
  return model;
}

Eigen::VectorXd predict_knn(const KnnModel& m, const Eigen::MatrixXd& features) {
  const Eigen::Index ntrain = m.features.rows();
  const auto k = static_cast<Eigen::Index>(std::min<Eigen::Index>(m.k, ntrain));
  Eigen::VectorXd out(features.rows());
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(ntrain));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index t = 0; t < ntrain; ++t) {
      dist[static_cast<std::size_t>(t)] = {(m.features.row(t) - features.row(i)).squaredNorm(), t};
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    std::partial_sort(dist.begin(), dist.begin() + k, dist.begin() + k);
    double sum = 0.0;
    for (Eigen::Index t = 0; t < k; ++t) sum += m.labels(dist[static_cast<std::size_t>(t)].second);
    out(i) = sum / static_cast<double>(k);
  }
  return out;
}

}  // namespace

LearnerSpec parse_learner(const std::string& text) {
  if (text == "logistic" || text == "logistic-irls") return LogisticSpec{};
  if (text == "constant" || text == "constant-mean") return ConstantSpec{};
  if (text == "cell" || text == "cell-mean") return CellMeanSpec{};
  if (text.rfind("knn:", 0) == 0) {
    const std::string k = text.substr(4);
    try {
      std::size_t used = 0;
      const int kk = std::stoi(k, &used);
      if (used != k.size() || kk < 1) throw ValidationError("bad k");
      return KnnSpec{kk};
    } catch (const std::exception&) {
      throw ValidationError("invalid knn learner '" + text + "': expected knn:K with K >= 1");
    }
  }
  throw ValidationError("unknown learner '" + text + "' (expected logistic|knn:K|constant|cell)");
}

std::string describe(const LearnerSpec& spec) {
  return std::visit(overloaded{
                        [](const LogisticSpec&) { return std::string("logistic"); },
                        [](const KnnSpec& s) { return "knn:" + std::to_string(s.k); },
                        [](const ConstantSpec&) { return std::string("constant"); },
                        [](const CellMeanSpec&) { return std::string("cell"); },
                    },
                    spec);
}

void validate(const LearnerSpec& spec) {
  std::visit(overloaded{
                 [](const LogisticSpec& s) {
                   if (s.max_iterations < 1 || !(s.tolerance > 0.0)) {
                     throw ValidationError("logistic learner needs max_iterations >= 1 and tolerance > 0");
                   }
                 },
                 [](const KnnSpec& s) {
                   if (s.k < 1) throw ValidationError("knn learner needs k >= 1");
                 },
                 [](const auto&) {},
             },
             spec);
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& features) const {
  return std::visit(
      overloaded{
          [&](const LogisticModel& m) -> Eigen::VectorXd {
            const Eigen::VectorXd eta = linear_predictor(with_intercept(features), m.coef);
            return eta.unaryExpr([](double e) { return expit(e); });
          },
          [&](const KnnModel& m) -> Eigen::VectorXd { return predict_knn(m, features); },
          [&](const ConstantModel& m) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(features.rows(), m.value);
          },
          [&](const CellMeanModel& m) -> Eigen::VectorXd {
            Eigen::VectorXd out(features.rows());
            std::vector<double> key(static_cast<std::size_t>(features.cols()));
            for (Eigen::Index i = 0; i < features.rows(); ++i) {
              for (Eigen::Index j = 0; j < features.cols(); ++j) key[static_cast<std::size_t>(j)] = features(i, j);
              auto it = m.cells.find(key);
              out(i) = it == m.cells.end() ? m.fallback : it->second;
            }
            return out;
          },
      },
      model_);
}

FittedModel train_learner(const LearnerSpec& spec, const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& labels, Warnings* warnings) {
  validate(spec);
  if (features.rows() != labels.size()) {
    throw ValidationError("train_learner: features and labels differ in length");
  }
  if (labels.size() == 0) throw ValidationError("train_learner: no training rows");
  if ((labels.array() < 0.0).any() || (labels.array() > 1.0).any()) {
    throw ValidationError("train_learner: labels must lie in [0,1]");
  }
  return std::visit(
      overloaded{
          [&](const LogisticSpec& s) -> FittedModel {
            if (labels.size() < features.cols() + 1) {
              throw ValidationError("logistic learner needs at least p+1 training rows");
            }
            if (auto m = fit_logistic(s, features, labels)) return FittedModel{*m};
            if (warnings) {
              warnings->push_back("logistic IRLS did not converge; falling back to constant mean");
            }
            return FittedModel{ConstantModel{labels.mean()}};
          },
          [&](const KnnSpec& s) -> FittedModel { return FittedModel{fit_knn(s, features, labels)}; },
          [&](const ConstantSpec&) -> FittedModel { return FittedModel{ConstantModel{labels.mean()}}; },
          [&](const CellMeanSpec&) -> FittedModel { return FittedModel{fit_cells(features, labels)}; },
      },
      spec);
}

}  // namespace sharpiv
