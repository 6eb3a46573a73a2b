#include <doctest.h>

#include <cmath>
#include <random>

#include <sharpiv/bounds.hpp>
#include <sharpiv/normal.hpp>
#include <sharpiv/sharpness.hpp>
#include <sharpiv/simlab.hpp>

#include "fixtures.hpp"

using namespace sharpiv;

TEST_CASE("sharpness identities") {
  const auto a = sharpness_identities(0.3, 0.8);
  CHECK(a.error_hq == doctest::Approx(0.084));
  CHECK(a.length_hq == doctest::Approx(0.14));
  const auto b = sharpness_identities(0.4, 1.0);
  CHECK(b.error_hq == 0.0);
  CHECK(b.length_hq == 0.0);
  CHECK(sharpness_identities(0.301, 0.209).error_hq == doctest::Approx(0.333).epsilon(1e-3));
}

TEST_CASE("generalised identities on score populations") {
  // any classifier h on a finite score population: E(h) and ℓ(h) from (μ, ψ(h), E h)
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd g(40), h(40);
    for (auto& v : g) v = u(rng);
    for (auto& v : h) v = u(rng) < 0.4;
    if (h.sum() == 0 || h.sum() == 40) continue;
    const double mu = g.mean();
    const double psi = classifier_sharpness(g, h);
    const double eh = h.mean();
    // classifier_sharpness is a correlation; the identities use the covariance scaled by var(C)
    const double psi_ve = psi * std::sqrt(eh * (1 - eh) / (mu * (1 - mu)));
    CHECK(classification_error(g, h) == doctest::Approx(classifier_error_identity(mu, psi_ve, eh)).epsilon(1e-10));
    CHECK(bound_length(g, h) == doctest::Approx(bound_length_identity(mu, psi_ve, eh)).epsilon(1e-10));
  }
}

TEST_CASE("youden index") {
  Eigen::VectorXd c(6), h(6);
  c << 1, 0, 1, 0, 1, 1;
  CHECK(youden_index(c, c) == 1.0);
  h << 1, 0, 0, 1, 1, 0;
  CHECK(youden_index(c, h) == doctest::Approx(0.5 - 0.5));
  CHECK(youden_index(c, h) == doctest::Approx(variance_explained(c, h)).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(youden_index(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)),
                       doctest::Contains("single class"), ValidationError);

  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd cc(100000), hh(100000);
  for (Eigen::Index i = 0; i < cc.size(); ++i) {
    cc(i) = coin(rng);
    hh(i) = coin(rng);
  }
  CHECK(std::abs(youden_index(cc, hh)) < 0.02);
}

TEST_CASE("strength estimate flags the boundary") {
  Eigen::VectorXd z(40);
  for (Eigen::Index i = 0; i < 40; ++i) z(i) = static_cast<double>(i % 2);
  const auto ds = make_dataset(Eigen::MatrixXd::Zero(40, 1), z, z, Eigen::VectorXd::Zero(40));
  const auto nf = fit_crossfit(ds, assign_folds(40, 2, 3), ConstantSpec{});
  const auto mu = estimate_strength(ds, nf);
  CHECK(mu.mu_hat == doctest::Approx(1.0));
  CHECK_FALSE(mu.in_range);
  const auto hq = quantile_classifier(Eigen::VectorXd::LinSpaced(40, 0, 1), 0.5);
  CHECK_THROWS_WITH_AS(estimate_sharpness(ds, nf, hq, mu), doctest::Contains("outside (0,1)"),
                       ValidationError);
}

TEST_CASE("population sharpness equals corr(C, h_q) from latent labels") {
  // finite score populations where the latent C is enumerated exactly: each
  // score value k/8 carries 8 units of which k are compliers
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> k8(0, 8);
  for (int rep = 0; rep < 100; ++rep) {
    const int levels = 3 + rep % 5;
    std::vector<int> k(static_cast<std::size_t>(levels));
    for (auto& v : k) v = k8(rng);
    Eigen::VectorXd g(levels * 8), c(levels * 8);
    for (int l = 0; l < levels; ++l) {
      for (int j = 0; j < 8; ++j) {
        g(l * 8 + j) = k[static_cast<std::size_t>(l)] / 8.0;
        c(l * 8 + j) = j < k[static_cast<std::size_t>(l)] ? 1.0 : 0.0;
      }
    }
    const double mu = g.mean();
    if (mu <= 0.0 || mu >= 1.0 || g.maxCoeff() == g.minCoeff()) continue;
    // top levels holding at most a μ share of units
    ComplierAssignment hq;
    try {
      hq = quantile_classifier(g, mu);
    } catch (const ValidationError&) {
      continue;  // the top score level alone exceeds a μ share
    }
    const double xi = g.dot(hq.h) / g.size();
    const double psi_identified = (xi - mu * mu) / (mu - mu * mu);
    const double eh = hq.h.mean();
    const double cov = c.dot(hq.h) / c.size() - mu * eh;
    const double psi_latent = cov / (mu * (1 - mu));
    if (std::abs(eh - mu) < 1e-12) {
      CHECK(psi_identified == doctest::Approx(psi_latent).epsilon(1e-10));
    }
    CHECK(youden_index(c, hq.h) == doctest::Approx(psi_latent).epsilon(1e-10));
    CHECK(variance_explained(c, hq.h) == doctest::Approx(psi_latent).epsilon(1e-10));
  }
}

TEST_CASE("sharpness influence function") {
  // matches a numerical derivative of ψ along φ_μ perturbations
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u;
  const Eigen::Index n = 50;
  Eigen::VectorXd phi(n), h(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i) = u(rng) * 1.4 - 0.2;
    h(i) = u(rng) < 0.3;
  }
  const double mu = phi.mean();
  const double xi = phi.dot(h) / n;
  const auto inf = sharpness_influence(phi, h, mu, xi, 0.0);
  // with q = 0 the first term is the ξ influence; centred sum is zero
  CHECK(inf.mean() == doctest::Approx(0.0).epsilon(1e-12));
  const double slope = (2 * mu * xi - xi - mu * mu) / std::pow(mu - mu * mu, 2);
  auto psi = [](double m, double x) { return (x - m * m) / (m - m * m); };
  const double eps = 1e-6;
  CHECK((psi(mu + eps, xi) - psi(mu - eps, xi)) / (2 * eps) == doctest::Approx(slope).epsilon(1e-6));
}

TEST_CASE("constant scores give a degenerate zero sharpness") {
  const auto sim = simulate_dataset({normal_quantile(0.3), 0.0, 0.2, 1000, 5});
  const auto nf = fit_crossfit(sim.data, assign_folds(1000, 2, 5), ConstantSpec{});
  const auto mu = estimate_strength(sim.data, nf);
  REQUIRE(mu.in_range);
  const auto hq = quantile_classifier_by_fold(nf.gamma, nf.folds, mu.mu_hat);
  const auto r = estimate_sharpness(sim.data, nf, hq, mu);
  CHECK(r.degenerate);
  CHECK(r.psi_hat == 0.0);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("sharpness on the simulation DGP") {
  const auto p = solve_dgp_params(0.3, 0.8);
  const auto sim = simulate_dataset({p.b0, p.b1, 0.2, 5000, 123});
  const auto ds = sim.with_score_covariate();
  const auto folds = assign_folds(5000, 2, 123);
  const auto nf = fit_crossfit(ds, folds, LogisticSpec{});
  const auto mu = estimate_strength(ds, nf);
  CHECK(std::abs(mu.mu_hat - 0.3) <= 3 * mu.se);
  const auto hq = quantile_classifier_by_fold(nf.gamma, folds, mu.mu_hat);
  const auto r = estimate_sharpness(ds, nf, hq, mu);
  CHECK(std::abs(r.psi_hat - 0.8) < 0.1);
  CHECK(r.psi_se > 0.01);
  CHECK(r.psi_se < 0.06);
  REQUIRE(r.logit_ci.has_value());
  CHECK(r.logit_ci->first >= 0.0);
  CHECK(r.logit_ci->second <= 1.0);
  CHECK(r.logit_ci->first < r.psi_hat);
  CHECK(r.logit_ci->second > r.psi_hat);
  // the two intervals agree to first order
  const double wald_mid = 0.5 * (r.wald_ci.first + r.wald_ci.second);
  const double logit_mid = 0.5 * (r.logit_ci->first + r.logit_ci->second);
  CHECK(std::abs(wald_mid - logit_mid) <= 0.5 * (r.wald_ci.second - r.wald_ci.first));
  CHECK(r.xi_hat == doctest::Approx(phi_mu(ds, nf).dot(hq.h) / 5000).epsilon(1e-12));
  CHECK(r.wald_ci.second - r.wald_ci.first == doctest::Approx(2 * 1.959964 * r.psi_se).epsilon(1e-6));
  // γ at the cutoff, estimated without trusting the calibration of γ̂
  CHECK(std::abs(r.q_boundary - oracle_moments(p.b0, p.b1).q) < 0.1);
}

TEST_CASE("logit interval stays in the unit interval") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u;
  for (int rep = 0; rep < 20; ++rep) {
    const double psi = 0.05 + 0.9 * u(rng);
    const auto p = solve_dgp_params(0.3, psi);
    const auto sim = simulate_dataset({p.b0, p.b1, 0.2, 600, static_cast<std::uint64_t>(rep)});
    const auto ds = sim.with_score_covariate();
    const auto folds = assign_folds(600, 2, rep);
    const auto nf = fit_crossfit(ds, folds, LogisticSpec{});
    const auto mu = estimate_strength(ds, nf);
    if (!mu.in_range) continue;
    const auto hq = quantile_classifier_by_fold(nf.gamma, folds, mu.mu_hat);
    const auto r = estimate_sharpness(ds, nf, hq, mu);
    if (r.logit_ci) {
      CHECK(r.logit_ci->first >= 0.0);
      CHECK(r.logit_ci->second <= 1.0);
    } else {
      CHECK((r.psi_hat <= 0.0 || r.psi_hat >= 1.0));
    }
  }
}
