#include "sharpiv/simlab.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "sharpiv/normal.hpp"
#include "sharpiv/quadrature.hpp"

namespace sharpiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kB1Lo = std::exp(-2.8);
const double kB1Hi = std::exp(5.5);

void check_strength(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("strength must lie in (0,1)");
}

}  // namespace

OracleMoments oracle_moments(double b0, double b1) {
  if (!std::isfinite(b0) || !std::isfinite(b1)) throw ValidationError("oracle_moments: non-finite input");
  b1 = std::abs(b1);
  const double s = std::sqrt(1.0 + b1 * b1);
  OracleMoments m;
  m.mu = normal_cdf(b0 / s);
  if (!(m.mu > 0.0 && m.mu < 1.0)) throw NumericalError("oracle_moments: strength underflows");

  if (b1 == 0.0) {
    // Constant score; h_q is the upper-μ region of x, independent of C.
    const double g = m.mu;
    m.q = g;
    m.xi = g * m.mu;
    m.psi = 0.0;
    m.e_q = 2.0 * g * (1.0 - m.mu);
    m.e_s = 2.0 * (g - g * g);
    m.e_h0 = std::min(g, 1.0 - g);
    m.length_hq = 1.0 - g;
    return m;
  }

  const double xstar = -b0 / s;
  const double x0 = -b0 / b1;
  m.q = normal_cdf(b0 + b1 * xstar);
  const std::vector<double> breaks{xstar, x0};
  auto gamma = [&](double x) { return normal_cdf(b0 + b1 * x); };
  auto one_minus_gamma = [&](double x) { return normal_cdf(-(b0 + b1 * x)); };

  m.xi = gaussian_integral(gamma, xstar, kInf, breaks);
  m.psi = (m.xi - m.mu * m.mu) / (m.mu - m.mu * m.mu);
  m.e_q = 2.0 * gaussian_integral(gamma, -kInf, xstar, breaks);
  m.e_s = 2.0 * gaussian_integral([&](double x) { return gamma(x) * one_minus_gamma(x); }, -kInf,
                                  kInf, breaks);
  m.e_h0 = gaussian_integral(gamma, -kInf, x0, breaks) +
           gaussian_integral(one_minus_gamma, x0, kInf, breaks);
  m.length_hq = gaussian_integral(one_minus_gamma, xstar, kInf, breaks) / m.mu;
  return m;
}

double strength_preserving_b0(double mu, double b1) {
  check_strength(mu);
  return normal_quantile(mu) * std::sqrt(1.0 + b1 * b1);
}

DgpParams solve_dgp_params(double mu, double psi) {
  check_strength(mu);
  if (!(psi >= 0.0 && psi < 1.0)) {
    throw ValidationError("target sharpness must lie in [0,1); psi = 1 needs an indicator score");
  }
  if (psi == 0.0) return {normal_quantile(mu), 0.0, 0.0};

  auto psi_at = [&](double log_b1) {
    const double b1 = std::exp(log_b1);
    return oracle_moments(strength_preserving_b0(mu, b1), b1).psi;
  };
  double lo = std::log(kB1Lo);
  double hi = std::log(kB1Hi);
  if (psi < psi_at(lo) || psi > psi_at(hi)) {
    throw NumericalError("target sharpness outside the achievable range for b1 in [e^-2.8, e^5.5]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi_at(mid) < psi ? lo : hi) = mid;
  }
  const double b1 = std::exp(0.5 * (lo + hi));
  const double b0 = strength_preserving_b0(mu, b1);
  return {b0, b1, oracle_moments(b0, b1).psi};
}

std::vector<std::pair<double, double>> psi_curve(double mu, const std::vector<double>& b1_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(b1_grid.size());
  for (double b1 : b1_grid) {
    out.emplace_back(b1, oracle_moments(strength_preserving_b0(mu, b1), b1).psi);
  }
  return out;
}

IVDataset SimulatedData::with_score_covariate() const {
  Eigen::MatrixXd x(data.size(), 2);
  x.col(0) = data.x.col(0);
  x.col(1) = gamma;
  return make_dataset(std::move(x), data.z, data.a, data.y, data.latent_c, {"x", "gamma"});
}

SimulatedData simulate_dataset(const DgpConfig& cfg) {
  if (!(std::abs(cfg.beta) <= 1.0)) throw ValidationError("treatment effect must satisfy |beta| <= 1");
  if (cfg.n == 0) throw ValidationError("sample size must be positive");
  const auto n = static_cast<Eigen::Index>(cfg.n);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto bern = [&](double p) { return unif(rng) < p ? 1.0 : 0.0; };

  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd z(n), a(n), y(n), c(n);
  SimulatedData out;
  out.gamma.resize(n);
  out.y1.resize(n);
  out.y0.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = normal(rng);
    const double g = normal_cdf(cfg.b0 + cfg.b1 * xi);
    const double ci = bern(g);
    const double zi = bern(expit(xi));
    const double astar = bern(0.5);
    const double ai = ci * zi + (1.0 - ci) * astar;
    const double y1 = bern(0.5 + cfg.beta / 2.0);
    const double y0 = bern(0.5 - cfg.beta / 2.0);
    x(i, 0) = xi;
    out.gamma(i) = g;
    c(i) = ci;
    z(i) = zi;
    a(i) = ai;
    out.y1(i) = y1;
    out.y0(i) = y0;
    y(i) = ai * y1 + (1.0 - ai) * y0;
  }
  out.data = make_dataset(std::move(x), std::move(z), std::move(a), std::move(y), std::move(c), {"x"});
  return out;
}

}  // namespace sharpiv
