#include "sharpiv/outcomes.hpp"

namespace sharpiv {

TransformedOutcomes transform_outcomes(const IVDataset& ds) {
  if (ds.size() > 0 && (ds.y.minCoeff() < 0.0 || ds.y.maxCoeff() > 1.0)) {
    throw ValidationError("outcome outside [0,1]: apply rescale_outcome before computing bounds");
  }
  const auto& y = ds.y.array();
  const auto& a = ds.a.array();
  TransformedOutcomes v;
  v.v_u1 = y * a + (1.0 - a);
  v.v_u0 = y * (1.0 - a);
  v.v_l1 = y * a;
  v.v_l0 = y * (1.0 - a) + a;
  return v;
}

}  // namespace sharpiv
