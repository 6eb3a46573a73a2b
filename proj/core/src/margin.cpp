#include <algorithm>
#include <cmath>
#include <limits>

#include "sharpiv/normal.hpp"
#include "sharpiv/simlab.hpp"

namespace sharpiv {

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ValidationError("empty t grid");
  for (double t : t_grid) {
    if (!(t > 0.0 && t < 1.0)) throw ValidationError("t grid values must lie in (0,1)");
  }
}

}  // namespace

std::vector<double> margin_grid(double tmax, std::size_t points) {
  if (!(tmax > 0.0 && tmax < 1.0)) throw ValidationError("tmax must lie in (0,1)");
  if (points == 0) throw ValidationError("grid needs at least one point");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = tmax * static_cast<double>(k + 1) / static_cast<double>(points);
  }
  return grid;
}

MarginCurve margin_curve(double b0, double b1, const std::vector<double>& t_grid) {
  check_grid(t_grid);
  const auto m = oracle_moments(b0, b1);
  b1 = std::abs(b1);
  MarginCurve curve;
  curve.q = m.q;
  curve.t = t_grid;
  for (double t : t_grid) {
    if (b1 == 0.0) {
      curve.prob.push_back(1.0);
      continue;
    }
    const double lo = m.q - t;
    const double hi = m.q + t;
    const double x_lo = lo <= 0.0 ? -std::numeric_limits<double>::infinity()
                                  : (normal_quantile(lo) - b0) / b1;
    const double x_hi = hi >= 1.0 ? std::numeric_limits<double>::infinity()
                                  : (normal_quantile(hi) - b0) / b1;
    curve.prob.push_back(normal_cdf(x_hi) - normal_cdf(x_lo));
  }
  fit_margin(curve);
  return curve;
}

MarginCurve margin_curve_uniform(double mu, const std::vector<double>& t_grid) {
  check_grid(t_grid);
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("strength must lie in (0,1)");
  MarginCurve curve;
  curve.q = 1.0 - mu;
  curve.t = t_grid;
  for (double t : t_grid) {
    curve.prob.push_back(std::min(curve.q + t, 1.0) - std::max(curve.q - t, 0.0));
  }
  fit_margin(curve);
  return curve;
}

void fit_margin(MarginCurve& curve) {
  if (curve.t.size() != curve.prob.size() || curve.t.empty()) {
    throw ValidationError("margin curve: grid and probabilities differ in length");
  }
  const bool flat = std::all_of(curve.prob.begin(), curve.prob.end(),
                                [](double p) { return p >= 1.0 - 1e-12; });
  if (flat) {
    curve.degenerate = true;
    curve.alpha = 0.0;
    curve.c = 1.0;
    curve.warnings.push_back("constant compliance score: no margin exponent alpha > 0");
    return;
  }
  std::vector<std::pair<double, double>> logs;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.prob[i] > 0.0) logs.emplace_back(std::log(curve.t[i]), std::log(curve.prob[i]));
  }
  if (logs.empty()) {
    curve.alpha = 0.0;
    curve.c = 0.0;
    curve.warnings.push_back("no score mass near the threshold on this grid");
    return;
  }
  double best_spread = std::numeric_limits<double>::infinity();
  for (int k = 50; k <= 4000; ++k) {
    const double alpha = k / 1000.0;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& [lt, lp] : logs) {
      const double r = lp - alpha * lt;
      hi = std::max(hi, r);
      lo = std::min(lo, r);
    }
    if (hi - lo < best_spread - 1e-15) {
      best_spread = hi - lo;
      curve.alpha = alpha;
      curve.c = std::exp(hi);
    }
  }
}

double margin_constant(const MarginCurve& curve, double alpha) {
  double c = 0.0;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    c = std::max(c, curve.prob[i] / std::pow(curve.t[i], alpha));
  }
  return c;
}

}  // namespace sharpiv
