#pragma once

#include <Eigen/Core>

#include "sharpiv/data.hpp"

namespace sharpiv {

/// Outcomes whose Z-stratum regressions bound the subgroup effect:
///   v_u1 = Y A + 1 - A,  v_u0 = Y (1 - A),
///   v_l1 = Y A,          v_l0 = Y (1 - A) + A.
/// Each lies in [0,1] when Y does.
struct TransformedOutcomes {
  Eigen::VectorXd v_u1;
  Eigen::VectorXd v_u0;
  Eigen::VectorXd v_l1;
  Eigen::VectorXd v_l0;
};

/// Requires y in [0,1]; call rescale_outcome() first otherwise.
TransformedOutcomes transform_outcomes(const IVDataset& ds);

}  // namespace sharpiv
