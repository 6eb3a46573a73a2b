// Acceptance suite. Usage: sharpiv_acceptance [criterion ...] (default: all).
// Prints one PASS/FAIL line per criterion; exits non-zero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sharpiv/sharpiv.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace sharpiv;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << what << "| ";
      pass = false;
    }
  }
};

std::string pp(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Table 1 at desk scale

struct TableRow {
  double psi;
  std::size_t n;
  double e_h0, e_hq, e_hs, len_ate, len_bhq, bias;
};

const std::vector<TableRow> kTable = {
    {0.2, 1000, 30.0, 35.1, 39.6, 70.1, 59.7, -3.7}, {0.5, 1000, 20.6, 21.4, 28.9, 69.9, 35.4, -0.4},
    {0.8, 1000, 8.4, 8.8, 13.6, 70.1, 14.4, -0.4},   {0.2, 5000, 29.6, 33.7, 39.4, 70.0, 56.4, -0.4},
    {0.5, 5000, 20.5, 21.0, 28.1, 70.1, 34.9, 0.4},  {0.8, 5000, 8.4, 8.5, 12.6, 70.0, 14.1, -0.1},
};

Outcome criterion_table(unsigned jobs) {
  Outcome o;
  MonteCarloConfig cfg;
  cfg.mu = 0.3;
  cfg.beta = 0.2;
  cfg.psi_list = {0.2, 0.5, 0.8};
  cfg.n_list = {1000, 5000};
  cfg.nsim = 200;
  cfg.folds = 2;
  cfg.learner = LogisticSpec{};
  cfg.jobs = jobs;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cells = run_monte_carlo(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  for (const auto& c : cells) {
    const auto row = std::find_if(kTable.begin(), kTable.end(),
                                  [&](const TableRow& r) { return r.psi == c.psi && r.n == c.n; });
    std::cout << "  psi=" << c.psi << " n=" << c.n << ": err " << pp(c.error_h0) << '/' << pp(c.error_hq) << '/'
              << pp(c.error_hs) << " (paper " << row->e_h0 << '/' << row->e_hq << '/' << row->e_hs << ")"
              << ", len ate " << pp(c.length_ate) << " bhq " << pp(c.length_bhq) << " (paper " << row->len_bhq
              << "), psi bias " << pp(c.psi_bias) << " sd " << pp(c.psi_sd) << " cov " << pp(c.psi_coverage)
              << ", bound cov ate " << pp(c.coverage_ate) << " bhq " << pp(c.coverage_bhq)
              << ", failures " << c.failures << '\n';
    auto near = [&](double got, double want, double tol, const char* what) {
      o.require(std::abs(100.0 * got - want) <= tol,
                std::string(what) + " off at psi=" + std::to_string(c.psi) + " n=" + std::to_string(c.n));
    };
    near(c.error_h0, row->e_h0, 2.0, "h0 error");
    near(c.error_hq, row->e_hq, 2.0, "hq error");
    near(c.error_hs, row->e_hs, 2.0, "hs error");
    near(c.length_bhq, row->len_bhq, 2.0, "beta(h_q) length");
    near(c.length_ate, 70.0, 1.0, "ATE length");
    if (c.n == 5000) o.require(std::abs(c.psi_bias) <= 0.015, "sharpness bias at n=5000");
    o.require(c.psi_coverage >= 0.91 && c.psi_coverage <= 0.99,
              "sharpness CI coverage " + pp(c.psi_coverage) + "% at psi=" + std::to_string(c.psi) +
                  " n=" + std::to_string(c.n) + " outside [91, 99]");
    o.require(c.failures == 0, "failed replications");
  }
  o.require(secs <= 600.0, "runtime above 10 minutes");
  if (o.pass) o.detail << "6 cells within tolerance, " << static_cast<int>(secs) << "s";
  else o.detail << " (" << static_cast<int>(secs) << "s)";
  return o;
}

// ---------------------------------------------------------------------------
// 2. First-stage F statistics

Outcome criterion_fstat() {
  Outcome o;
  FstatConfig cfg;
  cfg.n = 1000;
  cfg.nsim = 1000;
  const auto r = first_stage_fstat_demo(cfg);
  o.require(std::abs(r.mean_f_z1 - 101.5) <= 8.0, "mean F for Z1 ");
  o.require(std::abs(r.mean_f_z2_nointer - 99.4) <= 8.0, "mean F for Z2 without interaction ");
  o.require(std::abs(r.mean_f_z2_inter - 56.3) <= 8.0, "mean F for Z2 with interaction ");
  o.require(r.mean_f_z1 > r.mean_f_z2_inter, "ordering ");
  o.detail << "mean F = (" << r.mean_f_z1 << ", " << r.mean_f_z2_nointer << ", " << r.mean_f_z2_inter
           << ") vs (101.5, 99.4, 56.3)";
  return o;
}

// ---------------------------------------------------------------------------
// 3. Oracle identities on a 20 x 20 grid

Outcome criterion_identities() {
  Outcome o;
  double worst_error = 0.0, worst_length = 0.0;
  int chain_fail = 0, first_fail = 0, last_fail = 0, corrected_fail = 0, points = 0;
  double worst_first = 0.0, worst_last = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double b0 = -2.0 + 4.0 * i / 19.0;
    for (int j = 0; j < 20; ++j) {
      const double b1 = 0.05 + 4.95 * j / 19.0;
      const auto m = oracle_moments(b0, b1);
      ++points;
      worst_error = std::max(worst_error, std::abs(m.e_q - 2 * m.mu * (1 - m.mu) * (1 - m.psi)));
      worst_length = std::max(worst_length, std::abs(m.length_hq - (1 - m.mu) * (1 - m.psi)));
      const double lo_s = (1 - std::sqrt(1 - 2 * m.e_s)) / 2;
      const double lo_q = (1 - std::sqrt(1 - 2 * m.e_q)) / 2;
      const double tol = 1e-10;
      // as stated: lo_s <= lo_q <= E(h0) <= E_q <= E_s <= E(h0)(1-E(h0))
      if (lo_s > lo_q + tol) {
        ++first_fail;
        worst_first = std::max(worst_first, lo_s - lo_q);
      }
      if (m.e_s > m.e_h0 * (1 - m.e_h0) + tol) {
        ++last_fail;
        worst_last = std::max(worst_last, m.e_s - m.e_h0 * (1 - m.e_h0));
      }
      // provable: lo_q <= lo_s <= E(h0) <= E_q <= E_s <= 2E(h0)(1-E(h0))
      const bool chain = lo_q <= lo_s + tol && lo_s <= m.e_h0 + tol && m.e_h0 <= m.e_q + tol && m.e_q <= m.e_s + tol;
      chain_fail += !chain;
      corrected_fail += m.e_s > 2 * m.e_h0 * (1 - m.e_h0) + tol;
    }
  }
  o.require(worst_error <= 1e-8, "error identity ");
  o.require(worst_length <= 1e-8, "length identity ");
  o.require(first_fail == 0, "(1-sqrt(1-2E_s))/2 <= (1-sqrt(1-2E_q))/2 violated ");
  o.require(last_fail == 0, "E_s <= E(h0)(1-E(h0)) violated ");
  o.detail << "identities max dev " << std::max(worst_error, worst_length) << "; stated first link fails at "
           << first_fail << "/" << points << " (max excess " << worst_first << "); stated last link fails at "
           << last_fail << "/" << points << " (max excess " << worst_last
           << "); reordered chain with E_s <= 2E(h0)(1-E(h0)) fails at " << chain_fail + corrected_fail << "/"
           << points;
  return o;
}

// ---------------------------------------------------------------------------
// 4. Brute-force equivalence on discrete instances

Outcome criterion_bruteforce() {
  Outcome o;
  std::mt19937_64 rng(4);
  const NuisanceLearners cell{CellMeanSpec{}, CellMeanSpec{}, std::nullopt};
  double worst = 0.0;
  int instances = 0, subgroups = 0, sandwich_fail = 0, optimality_fail = 0;
  for (int rep = 0; rep < 500; ++rep) {
    const auto inst = oracle::random_instance(rng);
    const auto rows = inst.rows();
    const auto ds = fixtures::to_dataset(rows);
    const auto nf = fit_in_sample(ds, cell, 1e-6);
    ++instances;

    std::set<int> all;
    for (int l = 0; l < inst.levels; ++l) all.insert(l);
    worst = std::max(worst, std::abs(estimate_strength(ds, nf).mu_hat - oracle::enumerate_strength(rows)));
    worst = std::max(worst, std::abs(estimate_late(ds, nf).estimate - oracle::enumerate_late(rows, all)));

    for (int mask = 1; mask < (1 << inst.levels); ++mask) {
      std::set<int> levels;
      std::map<int, int> h;
      for (int l = 0; l < inst.levels; ++l) {
        h[l] = (mask >> l) & 1;
        if (h[l]) levels.insert(l);
      }
      ComplierAssignment g;
      g.h.resize(ds.size());
      for (Eigen::Index i = 0; i < ds.size(); ++i) g.h(i) = h[static_cast<int>(ds.x(i, 0))];
      const auto r = subgroup_bounds(ds, nf, g);
      const auto e = oracle::enumerate_bounds(rows, levels);
      worst = std::max({worst, std::abs(r.beta_l - e.lower), std::abs(r.beta_u - e.upper)});
      worst = std::max(worst, std::abs(classification_error(nf.gamma, g) - oracle::latent_error(rows, h)));
      const double truth = oracle::true_effect(rows, levels);
      sandwich_fail += !(e.lower <= truth + 1e-12 && truth <= e.upper + 1e-12);
      // subgroup LATE where the subgroup has compliers
      double den = 0;
      for (const auto& row : rows) den += levels.count(row.level) ? row.c : 0;
      if (den > 0) {
        worst = std::max(worst, std::abs(estimate_late(ds, nf, g.h).estimate - oracle::enumerate_late(rows, levels)));
      }
      ++subgroups;
    }

    // top-score subgroups minimise bound length among all subgroups of the same size
    const int n = static_cast<int>(ds.size());
    std::vector<double> sorted(nf.gamma.begin(), nf.gamma.end());
    std::sort(sorted.rbegin(), sorted.rend());
    std::vector<double> best(static_cast<std::size_t>(n + 1), 1e9);
    Eigen::VectorXd hv(n);
    for (long mask = 1; mask < (1L << n); ++mask) {
      for (int i = 0; i < n; ++i) hv(i) = (mask >> i) & 1;
      const auto m = static_cast<std::size_t>(hv.sum());
      best[m] = std::min(best[m], bound_length(nf.gamma, hv));
    }
    double top = 0.0;
    for (int m = 1; m <= n; ++m) {
      top += 1.0 - sorted[static_cast<std::size_t>(m - 1)];
      optimality_fail += std::abs(best[static_cast<std::size_t>(m)] - top / m) > 1e-12;
    }
  }
  o.require(worst <= 1e-10, "enumeration mismatch ");
  o.require(sandwich_fail == 0, "identification sandwich ");
  o.require(optimality_fail == 0, "top-score optimality ");
  o.detail << instances << " instances, " << subgroups << " covariate subgroups, max dev " << worst
           << ", sandwich failures " << sandwich_fail << ", optimality failures " << optimality_fail;
  return o;
}

// ---------------------------------------------------------------------------
// 5. DGP solver roundtrip and Monte Carlo cross-check

Outcome criterion_solver() {
  Outcome o;
  double worst = 0.0;
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 9; ++j) {
      const double mu = 0.1 * i, psi = 0.1 * j;
      const auto p = solve_dgp_params(mu, psi);
      worst = std::max(worst, std::abs(oracle_moments(p.b0, p.b1).psi - psi));
    }
  }
  o.require(worst <= 1e-3, "roundtrip ");
  double worst_z = 0.0;
  std::uint64_t seed = 1;
  for (const auto& [mu, psi] : std::vector<std::pair<double, double>>{{0.3, 0.2}, {0.3, 0.8}, {0.1, 0.5}}) {
    const auto p = solve_dgp_params(mu, psi);
    const auto mc = oracle::latent_psi_mc(p.b0, p.b1, 10000000, seed++);
    worst_z = std::max(worst_z, std::abs(oracle_moments(p.b0, p.b1).psi - mc.value) / mc.se);
  }
  o.require(worst_z <= 4.0, "Monte Carlo disagreement ");
  o.detail << "max roundtrip error " << worst << " over 45 targets; quadrature vs 1e7 draws max " << worst_z
           << " SE";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Youden identity, exhaustive

Outcome criterion_youden() {
  Outcome o;
  double worst = 0.0;
  long pairs = 0;
  for (int n = 2; n <= 10; ++n) {
    Eigen::VectorXd c(n), h(n);
    for (long cm = 1; cm < (1L << n) - 1; ++cm) {
      for (int i = 0; i < n; ++i) c(i) = (cm >> i) & 1;
      for (long hm = 0; hm < (1L << n); ++hm) {
        for (int i = 0; i < n; ++i) h(i) = (hm >> i) & 1;
        worst = std::max(worst, std::abs(youden_index(c, h) - variance_explained(c, h)));
        ++pairs;
      }
    }
  }
  o.require(worst <= 1e-12, "identity ");
  o.detail << pairs << " label/prediction pairs, max dev " << worst;
  return o;
}

// ---------------------------------------------------------------------------
// 7. Modified quantile classifier excess error

Outcome criterion_modified() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> levels_d(2, 6), count_d(1, 4), k16(0, 16), shift(-3, 3), slack_d(0, 2);
  int violations = 0;
  double worst_ratio = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int levels = levels_d(rng);
    std::vector<double> g, gh;
    for (int l = 0; l < levels; ++l) {
      const double gl = k16(rng) / 16.0;
      const double ghl = std::clamp(gl + shift(rng) / 32.0, 0.0, 1.0);
      const int count = count_d(rng);
      for (int c = 0; c < count; ++c) {
        g.push_back(gl);
        gh.push_back(ghl);
      }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    const Eigen::VectorXd gamma = Eigen::Map<Eigen::VectorXd>(g.data(), n);
    const Eigen::VectorXd gamma_hat = Eigen::Map<Eigen::VectorXd>(gh.data(), n);
    const double mu = gamma.mean();
    if (mu <= 0.0 || mu >= 1.0) continue;

    // population quantile of the true scores, and an estimate off by a known amount
    std::vector<double> sorted(g);
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<std::size_t>(std::clamp<double>(std::ceil(n * (1 - mu) - 1e-9), 1, n));
    const double q = sorted[idx - 1];
    const double qhat = q + shift(rng) / 64.0;
    const double kappa1 = (gamma_hat - gamma).cwiseAbs().maxCoeff() + slack_d(rng) / 64.0;
    const double kappa2 = std::abs(qhat - q) + slack_d(rng) / 64.0;

    Eigen::VectorXd hq(n);
    for (Eigen::Index i = 0; i < n; ++i) hq(i) = gamma(i) >= q ? 1.0 : 0.0;
    const auto h = modified_quantile_classifier(gamma_hat, qhat, kappa1, kappa2);
    const double excess = classification_error(gamma, h) - classification_error(gamma, hq);
    const double l1 = (gamma_hat - gamma).cwiseAbs().mean();
    if (excess > 2 * l1 + 1e-12) ++violations;
    if (l1 > 0) worst_ratio = std::max(worst_ratio, excess / (2 * l1));
  }
  o.require(violations == 0, "bound violated ");
  o.detail << "1000 instances, " << violations << " violations, max excess/(2 mean|err|) = " << worst_ratio;
  return o;
}

// ---------------------------------------------------------------------------
// 8. Format references

Outcome criterion_format() {
  Outcome o;
  const auto im = imbens_manski_ci(-0.171, 0.387, 0.01094, 0.0152, 1.0, 0.95);
  o.require(std::abs(im.lo + 0.189) <= 1e-3 && std::abs(im.hi - 0.412) <= 1e-3, "Imbens-Manski reference ");
  const auto [lo333, hi333] = bayes_error_bounds(0.333);
  o.require(std::abs(lo333 - 0.211) <= 1e-3 && hi333 == 0.333, "Bayes sandwich at 0.333 ");
  const auto [lo25, hi25] = bayes_error_bounds(0.25);
  o.require(std::abs(lo25 - 0.1464) <= 1e-4 && hi25 == 0.25, "Bayes sandwich at 0.25 ");
  const double e = sharpness_identities(0.301, 0.209).error_hq;
  o.require(std::abs(e - 0.333) <= 1e-3, "quantile error from (0.301, 0.209) ");
  o.detail << "IM [" << im.lo << ", " << im.hi << "], Bayes(0.333) [" << lo333 << ", " << hi333 << "], Bayes(0.25) lower "
           << lo25 << ", 2mu(1-mu)(1-psi) = " << e;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SHARPIV_JOBS")) jobs = static_cast<unsigned>(std::max(1, std::atoi(env)));

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria = {
      {1, {"Monte Carlo table", [&] { return criterion_table(jobs); }}},
      {2, {"first-stage F statistics", criterion_fstat}},
      {3, {"oracle identities and error chain", criterion_identities}},
      {4, {"brute-force equivalence", criterion_bruteforce}},
      {5, {"DGP solver roundtrip", criterion_solver}},
      {6, {"Youden identity", criterion_youden}},
      {7, {"modified quantile classifier", criterion_modified}},
      {8, {"format references", criterion_format}},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [k, v] : criteria) selected.push_back(k);
  }

  int failed = 0;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cout << "criterion " << k << ": FAIL unknown criterion\n";
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << k << " (" << it->second.first << "): " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
