#pragma once

#include <cmath>

#include <Eigen/Core>

namespace sharpiv::detail {

inline double sample_sd(const Eigen::VectorXd& v) {
  const auto n = v.size();
  if (n < 2) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(n - 1));
}

inline double standard_error(const Eigen::VectorXd& influence) {
  return sample_sd(influence) / std::sqrt(static_cast<double>(influence.size()));
}

}  // namespace sharpiv::detail
