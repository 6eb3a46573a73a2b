#include "sharpiv/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sharpiv/data.hpp"
#include "sharpiv/error.hpp"
#include "sharpiv/normal.hpp"

namespace sharpiv {

namespace {
constexpr double kGaussianCutoff = 12.0;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& breaks, double abs_tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw ValidationError("integrate: limits must be finite");
  }
  if (b <= a) return 0.0;
  std::vector<double> points{a};
  for (double p : breaks) {
    if (p > a && p < b) points.push_back(p);
  }
  points.push_back(b);
  std::sort(points.begin(), points.end());

  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] <= points[i]) continue;
    double piece_error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, points[i], points[i + 1], 15, 1e-12, &piece_error);
    error += piece_error;
  }
  if (!std::isfinite(total) || error > abs_tol) {
    throw NumericalError("quadrature did not converge (error estimate " + format_double(error) +
                         ")");
  }
  return total;
}

double gaussian_integral(const std::function<double(double)>& f, double a, double b,
                         const std::vector<double>& breaks, double abs_tol) {
  const double lo = std::max(a, -kGaussianCutoff);
  const double hi = std::min(b, kGaussianCutoff);
  return integrate([&](double x) { return f(x) * normal_pdf(x); }, lo, hi, breaks, abs_tol);
}

}  // namespace sharpiv
