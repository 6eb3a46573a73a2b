#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sharpiv/error.hpp"

namespace sharpiv {

/// Logistic regression (with intercept) fit by iteratively reweighted least
/// squares. Labels may be fractional in [0,1] (quasi-binomial).
struct LogisticSpec {
  int max_iterations = 50;
  double tolerance = 1e-10;  ///< on |dev - dev_old| / (|dev| + 0.1)
};

/// Mean label of the k nearest training rows (Euclidean).
struct KnnSpec {
  int k = 25;
};

/// Training-label mean, ignoring covariates.
struct ConstantSpec {};

/// Mean label among training rows with an identical covariate vector;
/// falls back to the overall mean for unseen rows. Saturated for discrete X.
struct CellMeanSpec {};

using LearnerSpec = std::variant<LogisticSpec, KnnSpec, ConstantSpec, CellMeanSpec>;

/// Parses "logistic", "knn:K", "constant" or "cell".
LearnerSpec parse_learner(const std::string& text);
std::string describe(const LearnerSpec& spec);
void validate(const LearnerSpec& spec);

struct LogisticModel {
  Eigen::VectorXd coef;  ///< intercept first
};

struct KnnModel {
  int k = 1;
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;
};

struct ConstantModel {
  double value = 0.0;
};

struct CellMeanModel {
  std::map<std::vector<double>, double> cells;
  double fallback = 0.0;
};

/// A trained regression function x -> E(label | x).
class FittedModel {
 public:
  using Model = std::variant<LogisticModel, KnnModel, ConstantModel, CellMeanModel>;

  explicit FittedModel(Model model) : model_(std::move(model)) {}

  [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
  [[nodiscard]] const Model& model() const { return model_; }

 private:
  Model model_;
};

/// Fits `spec` to (features, labels). Logistic non-convergence falls back to
/// the constant mean and records a warning; a singular weighted design is
/// retried once with a 1e-8 ridge.
FittedModel train_learner(const LearnerSpec& spec, const Eigen::MatrixXd& features,
                          const Eigen::VectorXd& labels, Warnings* warnings = nullptr);

}  // namespace sharpiv
