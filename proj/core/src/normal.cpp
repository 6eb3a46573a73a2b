#include "sharpiv/normal.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "sharpiv/error.hpp"

namespace sharpiv {

namespace {
const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};
}

double normal_pdf(double x) { return boost::math::pdf(kStdNormal, x); }

double normal_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(kStdNormal, x);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("normal_quantile: probability must lie in (0,1)");
  }
  return boost::math::quantile(kStdNormal, p);
}

double expit(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double two_sided_critical(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ValidationError("confidence level must lie in (0,1)");
  }
  return normal_quantile(0.5 + level / 2.0);
}

}  // namespace sharpiv
