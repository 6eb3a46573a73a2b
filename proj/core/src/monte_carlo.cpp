#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "sharpiv/bounds.hpp"
#include "sharpiv/classify.hpp"
#include "sharpiv/nuisance.hpp"
#include "sharpiv/sharpness.hpp"
#include "sharpiv/simlab.hpp"

namespace sharpiv {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Replication {
  bool ok = false;
  double e_h0 = 0.0;
  double e_hq = 0.0;
  double e_hs = 0.0;
  double length_ate = 0.0;
  double length_bhq = 0.0;
  bool cover_ate = false;
  bool cover_bhq = false;
  double psi_hat = 0.0;
  bool cover_psi = false;
  double mu_hat = 0.0;
};

bool contains(const std::pair<double, double>& ci, double v) { return ci.first < v && v < ci.second; }

Replication replicate(const MonteCarloConfig& cfg, const DgpParams& params, std::size_t n,
                      double psi_true, std::uint64_t rep_seed) {
  Replication r;
  try {
    const auto sim = simulate_dataset({params.b0, params.b1, cfg.beta, n, splitmix64(rep_seed)});
    const auto ds = sim.with_score_covariate();
    const auto& c = *ds.latent_c;
    const auto folds = assign_folds(static_cast<std::size_t>(ds.size()), cfg.folds,
                                    splitmix64(rep_seed ^ 0xF0F0F0F0ULL));
    const auto nf = fit_crossfit(ds, folds, cfg.learner);
    const auto mu = estimate_strength(ds, nf);
    const auto hq = quantile_classifier_by_fold(nf.gamma, folds, mu.mu_hat);
    const auto h0 = bayes_classifier(nf.gamma);
    const auto hs = stochastic_classifier(nf.gamma, splitmix64(rep_seed ^ 0x5151515151ULL));

    r.e_h0 = misclassification_rate(c, h0.h);
    r.e_hq = misclassification_rate(c, hq.h);
    r.e_hs = misclassification_rate(c, hs.h);

    const auto ate = ate_bounds(ds, nf, cfg.level);
    const auto bhq = subgroup_bounds(ds, nf, hq, cfg.level);
    r.length_ate = ate.length();
    r.length_bhq = bhq.length();
    r.cover_ate = contains(ate.im_interval, cfg.beta);
    r.cover_bhq = contains(bhq.im_interval, cfg.beta);

    const auto sh = estimate_sharpness(ds, nf, hq, mu, cfg.level);
    r.psi_hat = sh.psi_hat;
    r.cover_psi = contains(sh.logit_ci ? *sh.logit_ci : sh.wald_ci, psi_true);
    r.mu_hat = mu.mu_hat;
    r.ok = true;
  } catch (const std::exception&) {
    r.ok = false;
  }
  return r;
}

MonteCarloCell summarize(const std::vector<Replication>& reps) {
  MonteCarloCell cell;
  cell.replications = reps.size();
  std::size_t ok = 0;
  for (const auto& r : reps) {
    if (!r.ok) {
      ++cell.failures;
      continue;
    }
    ++ok;
    cell.error_h0 += r.e_h0;
    cell.error_hq += r.e_hq;
    cell.error_hs += r.e_hs;
    cell.length_ate += r.length_ate;
    cell.length_bhq += r.length_bhq;
    cell.coverage_ate += r.cover_ate;
    cell.coverage_bhq += r.cover_bhq;
    cell.psi_mean += r.psi_hat;
    cell.psi_coverage += r.cover_psi;
    cell.mu_mean += r.mu_hat;
  }
  if (ok == 0) return cell;
  const double k = static_cast<double>(ok);
  for (double* v : {&cell.error_h0, &cell.error_hq, &cell.error_hs, &cell.length_ate,
                    &cell.length_bhq, &cell.coverage_ate, &cell.coverage_bhq, &cell.psi_mean,
                    &cell.psi_coverage, &cell.mu_mean}) {
    *v /= k;
  }
  if (ok > 1) {
    double ss = 0.0;
    for (const auto& r : reps) {
      if (r.ok) ss += (r.psi_hat - cell.psi_mean) * (r.psi_hat - cell.psi_mean);
    }
    cell.psi_sd = std::sqrt(ss / (k - 1.0));
  }
  return cell;
}

}  // namespace

std::vector<MonteCarloCell> run_monte_carlo(const MonteCarloConfig& cfg) {
  if (cfg.nsim == 0) throw ValidationError("nsim must be positive");
  if (cfg.folds < 2) throw ValidationError("need at least 2 folds");
  validate(cfg.learner);
  const unsigned jobs = std::max(1u, cfg.jobs);

  std::vector<MonteCarloCell> cells;
  for (double psi : cfg.psi_list) {
    const auto params = solve_dgp_params(cfg.mu, psi);
    for (std::size_t n : cfg.n_list) {
      std::vector<Replication> reps(cfg.nsim);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t r = next++; r < cfg.nsim; r = next++) {
          reps[r] = replicate(cfg, params, n, params.psi, cfg.seed + r);
        }
      };
      if (jobs == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
      }
      auto cell = summarize(reps);
      cell.psi = psi;
      cell.n = n;
      cell.b0 = params.b0;
      cell.b1 = params.b1;
      cell.psi_true = params.psi;
      cell.psi_bias = cell.psi_mean - params.psi;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<std::string> monte_carlo_csv_header() {
  return {"psi",         "n",          "nsim",         "failures",     "err_h0",
          "err_hq",      "err_hs",     "len_ate",      "len_bhq",      "cov_ate",
          "cov_bhq",     "psi_bias",   "psi_sd",       "psi_coverage", "mu_mean",
          "b0",          "b1"};
}

void save_monte_carlo_csv(const std::vector<MonteCarloCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  const auto header = monte_carlo_csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  auto pct = [](double v) { return format_double(100.0 * v); };
  for (const auto& c : cells) {
    out << format_double(c.psi) << ',' << c.n << ',' << c.replications << ',' << c.failures << ','
        << pct(c.error_h0) << ',' << pct(c.error_hq) << ',' << pct(c.error_hs) << ','
        << pct(c.length_ate) << ',' << pct(c.length_bhq) << ',' << pct(c.coverage_ate) << ','
        << pct(c.coverage_bhq) << ',' << pct(c.psi_bias) << ',' << pct(c.psi_sd) << ','
        << pct(c.psi_coverage) << ',' << pct(c.mu_mean) << ',' << format_double(c.b0) << ','
        << format_double(c.b1) << '\n';
  }
}

}  // namespace sharpiv
