#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sharpiv/sharpiv.hpp"

namespace sharpiv::cli {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* env = std::getenv("SHARPIV_SEED");
  if (env == nullptr || *env == '\0') return fallback;
  const std::string text(env);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("SHARPIV_SEED is not an unsigned integer: '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::string> read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("file not found: " + path);
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) cols.push_back(item);
  return cols;
}

// A 0/1 column read through the same validated loader as the dataset.
Eigen::VectorXd read_indicator(const std::string& path, ColumnSpec spec, const std::string& column) {
  spec.x_cols = {column};
  spec.c_col.reset();
  const auto ds = load_csv(path, spec);
  const Eigen::VectorXd g = ds.x.col(0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g(i) != 0.0 && g(i) != 1.0) throw ValidationError("subgroup column '" + column + "' must be 0/1");
  }
  return g;
}

json pair_json(const std::pair<double, double>& p) { return json::array({p.first, p.second}); }

void write_json(const json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot open output file: " + path);
  f << j.dump(2) << '\n';
}

json warnings_json(const Warnings& w) {
  json arr = json::array();
  for (const auto& s : w) arr.push_back(s);
  return arr;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string input;
  std::string y_col = "y";
  std::string a_col = "a";
  std::string z_col = "z";
  std::string x_cols;
  std::string c_col;
  std::string learner = "logistic";
  std::string propensity_learner;
  std::string treatment_learner;
  std::string outcome_learner;
  int folds = 2;
  std::optional<std::uint64_t> seed;
  double level = 0.95;
  std::string classifier = "quantile";
  std::string ci = "both";
  double clip = kDefaultClipEps;
  std::optional<double> quantile_level;
  std::optional<double> kappa1;
  std::optional<double> kappa2;
  std::optional<std::string> bounds;  ///< comma list of ate, hq, classifier, custom
  std::string subgroup_col;
  bool want_sharpness = false;
  bool want_late = false;
  std::string summary_path;
  std::string units_path;
};

json bounds_json(const BoundsReport& b, const ScaleInfo& scale) {
  auto eff = [&](double v) { return scale.to_original_effect(v); };
  json j;
  j["beta_l"] = eff(b.beta_l);
  j["beta_u"] = eff(b.beta_u);
  j["se_l"] = eff(b.se_l);
  j["se_u"] = eff(b.se_u);
  j["length"] = eff(b.length());
  j["ci_lo"] = eff(b.im_interval.first);
  j["ci_hi"] = eff(b.im_interval.second);
  j["level"] = b.level;
  j["subgroup_size"] = b.subgroup_size;
  j["crossed"] = b.crossed;
  return j;
}

std::pair<double, double> heuristic_kappas(const IVDataset& ds, const NuisanceFit& nf,
                                           const NuisanceLearners& learners, double clip,
                                           const ComplierAssignment& hq) {
  const auto full = fit_in_sample(ds, learners, clip);
  const double k1 = (nf.gamma - full.gamma).cwiseAbs().mean();
  double k2 = 0.0;
  for (double qb : hq.fold_qhat) k2 = std::max(k2, std::abs(qb - hq.qhat));
  return {k1, k2};
}

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  if (o.folds < 2) throw ValidationError("need at least 2 folds");
  if (!(o.level > 0.0 && o.level < 1.0)) throw ValidationError("confidence level must lie in (0,1)");
  if (o.ci != "wald" && o.ci != "logit" && o.ci != "both") {
    throw ValidationError("--ci must be wald, logit or both");
  }
  const auto kind = parse_classifier_kind(o.classifier);
  const std::uint64_t seed = o.seed ? *o.seed : env_seed(0);
  const bool all = !o.bounds && !o.want_sharpness && !o.want_late;
  std::vector<std::string> bound_sets;
  if (o.bounds && !o.bounds->empty() && *o.bounds != "all") {
    bound_sets = split_list(*o.bounds);
    for (const auto& s : bound_sets) {
      if (s != "ate" && s != "hq" && s != "classifier" && s != "custom") {
        throw ValidationError("--bounds accepts ate, hq, classifier or custom, got '" + s + "'");
      }
    }
  } else if (all || o.bounds) {
    bound_sets = {"ate", "hq", "classifier"};
    if (!o.subgroup_col.empty()) bound_sets.emplace_back("custom");
  }
  auto wants = [&](const char* s) {
    return std::find(bound_sets.begin(), bound_sets.end(), s) != bound_sets.end();
  };
  if (wants("custom") && o.subgroup_col.empty()) {
    throw ValidationError("--bounds custom needs --subgroup");
  }

  ColumnSpec spec;
  spec.y_col = o.y_col;
  spec.a_col = o.a_col;
  spec.z_col = o.z_col;
  if (!o.c_col.empty()) spec.c_col = o.c_col;
  if (!o.x_cols.empty()) {
    spec.x_cols = split_list(o.x_cols);
  } else {
    for (const auto& col : read_header(o.input)) {
      if (col != o.y_col && col != o.a_col && col != o.z_col && col != o.c_col) spec.x_cols.push_back(col);
    }
  }
  if (spec.x_cols.empty()) throw ValidationError("no covariate columns");

  Warnings warnings;
  const auto raw = load_csv(o.input, spec);
  const auto [ds, scale] = rescale_outcome(raw, &warnings);
  const auto folds = assign_folds(static_cast<std::size_t>(ds.size()), o.folds, seed);

  NuisanceLearners learners;
  const auto base = parse_learner(o.learner);
  learners.propensity = o.propensity_learner.empty() ? base : parse_learner(o.propensity_learner);
  learners.treatment = o.treatment_learner.empty() ? base : parse_learner(o.treatment_learner);
  if (!o.outcome_learner.empty()) learners.outcome = parse_learner(o.outcome_learner);

  const auto nf = fit_crossfit(ds, folds, learners, o.clip);
  append_warnings(warnings, nf.warnings);
  const auto mu = estimate_strength(ds, nf);
  append_warnings(warnings, mu.warnings);

  std::optional<ComplierAssignment> hq;
  if (mu.in_range || o.quantile_level) {
    hq = quantile_classifier_by_fold(nf.gamma, folds, o.quantile_level.value_or(mu.mu_hat));
    append_warnings(warnings, hq->warnings);
  } else {
    warnings.push_back("quantile classifier and sharpness skipped: strength estimate outside (0,1)");
  }

  ComplierAssignment chosen;
  std::string kappa_source;
  switch (kind) {
    case ClassifierKind::bayes: chosen = bayes_classifier(nf.gamma); break;
    case ClassifierKind::stochastic: chosen = stochastic_classifier(nf.gamma, seed); break;
    case ClassifierKind::quantile:
      if (!hq) throw ValidationError("quantile classifier requires a strength estimate in (0,1)");
      chosen = *hq;
      break;
    case ClassifierKind::modified_quantile: {
      if (!hq) throw ValidationError("modified classifier requires a strength estimate in (0,1)");
      double k1 = 0.0;
      double k2 = 0.0;
      if (!o.kappa1 || !o.kappa2) std::tie(k1, k2) = heuristic_kappas(ds, nf, learners, o.clip, *hq);
      kappa_source = (o.kappa1 && o.kappa2) ? "user" : (o.kappa1 || o.kappa2) ? "mixed" : "heuristic";
      chosen = modified_quantile_classifier(nf.gamma, hq->qhat, o.kappa1.value_or(k1),
                                            o.kappa2.value_or(k2));
      break;
    }
  }

  json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["input"] = o.input;
  summary["n"] = ds.size();
  summary["covariates"] = ds.covariate_names;
  summary["learners"] = {{"propensity", describe(learners.propensity)},
                         {"treatment", describe(learners.treatment)},
                         {"outcome", describe(learners.outcome_or_default())}};
  summary["folds"] = o.folds;
  summary["seed"] = seed;
  summary["level"] = o.level;
  summary["clip_eps"] = o.clip;
  summary["outcome_scale"] = {{"min", scale.y_min}, {"max", scale.y_max}, {"degenerate", scale.degenerate}};
  summary["strength"] = {{"mu_hat", mu.mu_hat}, {"se", mu.se}, {"in_range", mu.in_range}};

  json cls;
  cls["kind"] = to_string(chosen.kind);
  cls["selected_fraction"] = chosen.selected_fraction();
  if (kind == ClassifierKind::quantile || kind == ClassifierKind::modified_quantile) {
    cls["qhat"] = chosen.qhat;
  }
  if (kind == ClassifierKind::quantile) {
    cls["level"] = chosen.level;
    cls["fold_qhat"] = chosen.fold_qhat;
  }
  if (kind == ClassifierKind::modified_quantile) {
    cls["kappa1"] = chosen.kappa1;
    cls["kappa2"] = chosen.kappa2;
    cls["kappa_source"] = kappa_source;
  }
  if (kind == ClassifierKind::stochastic) cls["seed"] = chosen.seed;
  cls["degenerate"] = chosen.degenerate;
  summary["classifier"] = cls;

  if (hq) {
    const auto e = summarize_errors(nf.gamma, chosen, *hq);
    summary["errors"] = {{"classifier", e.e_hat}, {"quantile", e.e_q}, {"stochastic", e.e_s},
                         {"bayes_bounds", json::array({e.bayes_lower, e.bayes_upper})}};
  } else {
    const Eigen::VectorXd g = nf.gamma.cwiseMax(0.0).cwiseMin(1.0);
    summary["errors"] = {{"classifier", classification_error(g, chosen.h)},
                         {"stochastic", stochastic_rule_error(g)}};
  }

  if (!bound_sets.empty()) {
    json b;
    auto add_subgroup = [&](const char* key, const ComplierAssignment& g) {
      try {
        const auto sub = subgroup_bounds(ds, nf, g, o.level);
        if (sub.crossed) warnings.push_back(std::string(key) + " bounds cross");
        b[key] = bounds_json(sub, scale);
      } catch (const ValidationError& e) {
        warnings.push_back(std::string(key) + " bounds skipped: " + e.what());
        b[key] = nullptr;
      }
    };
    if (wants("ate")) b["ate"] = bounds_json(ate_bounds(ds, nf, o.level), scale);
    if (wants("hq")) {
      if (hq) {
        add_subgroup("hq", *hq);
      } else {
        b["hq"] = nullptr;
      }
    }
    if (wants("classifier") && kind != ClassifierKind::quantile) add_subgroup("classifier", chosen);
    if (wants("custom")) {
      ComplierAssignment custom;
      custom.kind = ClassifierKind::bayes;
      custom.h = read_indicator(o.input, spec, o.subgroup_col);
      add_subgroup("custom", custom);
    }
    summary["bounds"] = b;
  }

  if (all || o.want_sharpness) {
    if (hq && mu.in_range) {
      const auto sh = estimate_sharpness(ds, nf, *hq, mu, o.level);
      append_warnings(warnings, sh.warnings);
      json s;
      s["mu_hat"] = sh.mu_hat;
      s["mu_se"] = sh.mu_se;
      s["xi_hat"] = sh.xi_hat;
      s["q_hat"] = sh.q_hat;
      s["q_boundary"] = sh.q_boundary;
      s["psi_hat"] = sh.psi_hat;
      s["psi_se"] = sh.psi_se;
      if (o.ci != "logit") s["wald_ci"] = pair_json(sh.wald_ci);
      if (o.ci != "wald") s["logit_ci"] = sh.logit_ci ? pair_json(*sh.logit_ci) : json(nullptr);
      const auto id = sharpness_identities(sh.mu_hat, sh.psi_hat);
      s["implied_error_hq"] = id.error_hq;
      s["implied_length_hq"] = id.length_hq;
      s["degenerate"] = sh.degenerate;
      summary["sharpness"] = s;
    } else {
      summary["sharpness"] = nullptr;
    }
  }

  if (all || o.want_late) {
    try {
      const auto late = estimate_late(ds, nf);
      summary["late"] = {{"estimate", scale.to_original_effect(late.estimate)},
                         {"se", scale.to_original_effect(late.se)}};
    } catch (const ValidationError& e) {
      warnings.push_back(std::string("LATE skipped: ") + e.what());
      summary["late"] = nullptr;
    }
  }

  if (ds.latent_c) {
    const auto& c = *ds.latent_c;
    json lat;
    lat["misclassification"] = misclassification_rate(c, chosen.h);
    lat["misclassification_bayes"] = misclassification_rate(c, bayes_classifier(nf.gamma).h);
    if (hq) lat["misclassification_quantile"] = misclassification_rate(c, hq->h);
    const double nc = c.sum();
    if (nc > 0.0 && nc < static_cast<double>(c.size())) lat["youden"] = youden_index(c, chosen.h);
    summary["latent"] = lat;
  }

  summary["warnings"] = warnings_json(warnings);

  if (!o.units_path.empty()) {
    std::ofstream f(o.units_path);
    if (!f) throw ValidationError("cannot open output file: " + o.units_path);
    f << "unit,fold,z,a,pi1,lambda0,lambda1,gamma_hat,h";
    if (hq) f << ",h_q";
    f << '\n';
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
      f << i << ',' << nf.folds.b[static_cast<std::size_t>(i)] << ',' << format_double(ds.z(i)) << ','
        << format_double(ds.a(i)) << ',' << format_double(nf.pi1(i)) << ','
        << format_double(nf.lambda0(i)) << ',' << format_double(nf.lambda1(i)) << ','
        << format_double(nf.gamma(i)) << ',' << format_double(chosen.h(i));
      if (hq) f << ',' << format_double(hq->h(i));
      f << '\n';
    }
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  write_json(summary, o.summary_path, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  double mu = 0.3;
  std::string psi = "0.2,0.5,0.8";
  std::string n = "500,1000,5000";
  std::size_t nsim = 500;
  double beta = 0.2;
  int folds = 2;
  std::string learner = "logistic";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  double level = 0.95;
  std::string out_path;
};

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw ValidationError("not a positive integer: '" + s + "'");
  }
  return v;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  MonteCarloConfig cfg;
  cfg.mu = o.mu;
  cfg.psi_list.clear();
  for (const auto& s : split_list(o.psi)) cfg.psi_list.push_back(parse_double(s));
  cfg.n_list.clear();
  for (const auto& s : split_list(o.n)) cfg.n_list.push_back(parse_size(s));
  if (cfg.psi_list.empty() || cfg.n_list.empty()) throw ValidationError("empty --psi or --n list");
  cfg.beta = o.beta;
  cfg.nsim = o.nsim;
  cfg.seed = o.seed ? *o.seed : env_seed(2000);
  cfg.folds = o.folds;
  cfg.learner = parse_learner(o.learner);
  cfg.jobs = o.jobs;
  cfg.level = o.level;

  const auto cells = run_monte_carlo(cfg);
  if (!o.out_path.empty()) save_monte_carlo_csv(cells, o.out_path);

  out << std::fixed << std::setprecision(1);
  out << "psi    n      err_h0 err_hq err_hs len_ate len_bhq bias   sd    cov\n";
  for (const auto& c : cells) {
    out << std::setw(5) << c.psi << "  " << std::setw(5) << c.n << "  " << std::setw(6)
        << 100 * c.error_h0 << ' ' << std::setw(6) << 100 * c.error_hq << ' ' << std::setw(6)
        << 100 * c.error_hs << ' ' << std::setw(7) << 100 * c.length_ate << ' ' << std::setw(7)
        << 100 * c.length_bhq << ' ' << std::setw(6) << 100 * c.psi_bias << ' ' << std::setw(5)
        << 100 * c.psi_sd << ' ' << std::setw(5) << 100 * c.psi_coverage;
    if (c.failures) out << "  (" << c.failures << " failed)";
    out << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dgp-solve

struct SolveOptions {
  double mu = 0.3;
  double psi = 0.5;
  std::string curve_path;
  std::size_t points = 200;
};

int cmd_dgp_solve(const SolveOptions& o, std::ostream& out) {
  const auto p = solve_dgp_params(o.mu, o.psi);
  const auto m = oracle_moments(p.b0, p.b1);
  json j;
  j["mu"] = o.mu;
  j["psi"] = o.psi;
  j["b0"] = p.b0;
  j["b1"] = p.b1;
  j["oracle"] = {{"mu", m.mu},       {"psi", m.psi},   {"q", m.q},
                 {"error_hq", m.e_q}, {"error_hs", m.e_s}, {"error_h0", m.e_h0},
                 {"length_hq", m.length_hq}};
  if (!o.curve_path.empty()) {
    if (o.points < 2) throw ValidationError("--points must be at least 2");
    std::vector<double> grid(o.points);
    for (std::size_t k = 0; k < o.points; ++k) {
      grid[k] = std::exp(-2.8 + 8.3 * static_cast<double>(k) / static_cast<double>(o.points - 1));
    }
    std::ofstream f(o.curve_path);
    if (!f) throw ValidationError("cannot open output file: " + o.curve_path);
    f << "b1,psi\n";
    for (const auto& [b1, psi] : psi_curve(o.mu, grid)) f << format_double(b1) << ',' << format_double(psi) << '\n';
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fstat-demo

int cmd_fstat(const FstatConfig& cfg, std::ostream& out) {
  const auto r = first_stage_fstat_demo(cfg);
  const auto o = fstat_oracle();
  json j;
  j["n"] = cfg.n;
  j["nsim"] = cfg.nsim;
  j["seed"] = cfg.seed;
  j["identical"] = cfg.identical;
  j["mean_f"] = {{"z1", r.mean_f_z1}, {"z2_nointer", r.mean_f_z2_nointer}, {"z2_inter", r.mean_f_z2_inter}};
  j["oracle"] = {{"z1", {{"mu", o.mu_z1}, {"psi", o.psi_z1}}}, {"z2", {{"mu", o.mu_z2}, {"psi", o.psi_z2}}}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// margin

struct MarginOptions {
  double mu = 0.3;
  double psi = 0.75;
  double tmax = 0.3;
  std::size_t points = 100;
  bool uniform = false;
  std::optional<double> alpha;
  std::string out_path;
};

int cmd_margin(const MarginOptions& o, std::ostream& out) {
  const auto grid = margin_grid(o.tmax, o.points);
  MarginCurve curve;
  json j;
  if (o.uniform) {
    curve = margin_curve_uniform(o.mu, grid);
    j["scores"] = "uniform";
  } else {
    const auto p = solve_dgp_params(o.mu, o.psi);
    curve = margin_curve(p.b0, p.b1, grid);
    j["scores"] = "probit";
    j["b0"] = p.b0;
    j["b1"] = p.b1;
    j["psi"] = o.psi;
  }
  j["mu"] = o.mu;
  j["q"] = curve.q;
  j["tmax"] = o.tmax;
  j["c"] = curve.c;
  j["alpha"] = curve.alpha;
  j["degenerate"] = curve.degenerate;
  if (o.alpha) j["c_for_alpha"] = {{"alpha", *o.alpha}, {"c", margin_constant(curve, *o.alpha)}};
  j["warnings"] = warnings_json(curve.warnings);
  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path);
    if (!f) throw ValidationError("cannot open output file: " + o.out_path);
    f << "t,prob,envelope\n";
    for (std::size_t i = 0; i < curve.t.size(); ++i) {
      f << format_double(curve.t[i]) << ',' << format_double(curve.prob[i]) << ','
        << format_double(curve.c * std::pow(curve.t[i], curve.alpha)) << '\n';
    }
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  double mu = 0.3;
  double psi = 0.5;
  double beta = 0.2;
  std::size_t n = 1000;
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  const auto p = solve_dgp_params(o.mu, o.psi);
  const auto sim = simulate_dataset({p.b0, p.b1, o.beta, o.n, o.seed ? *o.seed : env_seed(0)});
  const auto ds = sim.with_score_covariate();
  if (o.out_path.empty()) throw ValidationError("--out is required");
  save_csv(ds, o.out_path);
  json j;
  j["out"] = o.out_path;
  j["n"] = o.n;
  j["b0"] = p.b0;
  j["b1"] = p.b1;
  out << j.dump(2) << '\n';
  return kExitOk;
}

void report_error(std::ostream& err, const char* kind, const std::string& message) {
  json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  err << j.dump() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complier classification, covariate-adjusted bounds and instrument sharpness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sharpiv 0.1.0");

  AnalyzeOptions ao;
  auto* analyze = app.add_subcommand("analyze", "Classify compliers, bound effects and estimate sharpness");
  analyze->add_option("--input,-i", ao.input, "CSV file with a header row")->required();
  analyze->add_option("--y,--y-col", ao.y_col, "Outcome column")->capture_default_str();
  analyze->add_option("--a,--a-col", ao.a_col, "Treatment column")->capture_default_str();
  analyze->add_option("--z,--z-col", ao.z_col, "Instrument column")->capture_default_str();
  analyze->add_option("--x,--x-cols", ao.x_cols, "Comma-separated covariate columns (default: all others)");
  analyze->add_option("--c,--c-col", ao.c_col, "Latent complier column, for simulated data");
  analyze->add_option("--learner", ao.learner, "logistic | knn:K | constant | cell")->capture_default_str();
  analyze->add_option("--propensity-learner", ao.propensity_learner, "Learner for P(Z=1|X)");
  analyze->add_option("--treatment-learner", ao.treatment_learner, "Learner for P(A=1|X,Z)");
  analyze->add_option("--outcome-learner", ao.outcome_learner, "Learner for the outcome regressions");
  analyze->add_option("--folds,-k", ao.folds, "Cross-fitting folds")->capture_default_str();
  analyze->add_option("--seed", ao.seed, "Random seed (default: $SHARPIV_SEED or 0)");
  analyze->add_option("--level", ao.level, "Confidence level")->capture_default_str();
  analyze->add_option("--classifier", ao.classifier, "bayes | quantile | stochastic | modified")
      ->capture_default_str();
  analyze->add_option("--ci", ao.ci, "wald | logit | both")->capture_default_str();
  analyze->add_option("--clip,--clip-eps", ao.clip, "Propensity clipping epsilon")->capture_default_str();
  analyze->add_option("--quantile-level", ao.quantile_level, "Selection fraction (default: estimated strength)");
  analyze->add_option("--kappa1", ao.kappa1, "Score-error window for the modified classifier");
  analyze->add_option("--kappa2", ao.kappa2, "Quantile-error window for the modified classifier");
  analyze->add_option("--bounds", ao.bounds, "Report bounds: ate,hq,classifier,custom (no value: all)")
      ->expected(0, 1)
      ->default_str("all");
  analyze->add_option("--subgroup", ao.subgroup_col, "0/1 column defining a custom subgroup");
  analyze->add_flag("--sharpness", ao.want_sharpness, "Report sharpness");
  analyze->add_flag("--late", ao.want_late, "Report the local average treatment effect");
  analyze->add_option("--summary", ao.summary_path, "Summary JSON path (default: stdout)");
  analyze->add_option("--units", ao.units_path, "Per-unit CSV path");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study over sharpness and sample size");
  simulate->add_option("--mu", so.mu, "Strength")->capture_default_str();
  simulate->add_option("--psi", so.psi, "Comma-separated sharpness values")->capture_default_str();
  simulate->add_option("--n", so.n, "Comma-separated sample sizes")->capture_default_str();
  simulate->add_option("--nsim", so.nsim, "Replications per cell")->capture_default_str();
  simulate->add_option("--beta", so.beta, "Treatment effect")->capture_default_str();
  simulate->add_option("--folds,-k", so.folds, "Cross-fitting folds")->capture_default_str();
  simulate->add_option("--learner", so.learner, "Nuisance learner")->capture_default_str();
  simulate->add_option("--seed", so.seed, "Master seed (default: $SHARPIV_SEED or 2000)");
  simulate->add_option("--jobs,-j", so.jobs, "Worker threads")->capture_default_str();
  simulate->add_option("--level", so.level, "Confidence level")->capture_default_str();
  simulate->add_option("--out,-o", so.out_path, "CSV output path");

  SolveOptions vo;
  auto* solve = app.add_subcommand("dgp-solve", "Find (b0, b1) for a target strength and sharpness");
  solve->add_option("--mu", vo.mu, "Strength")->capture_default_str();
  solve->add_option("--psi", vo.psi, "Sharpness")->capture_default_str();
  solve->add_option("--curve", vo.curve_path, "Write psi against b1 to this CSV");
  solve->add_option("--points", vo.points, "Curve points")->capture_default_str();

  FstatConfig fo;
  std::optional<std::uint64_t> fstat_seed;
  auto* fstat = app.add_subcommand("fstat-demo", "First-stage F statistics for two equally strong instruments");
  fstat->add_option("--n", fo.n, "Sample size")->capture_default_str();
  fstat->add_option("--nsim", fo.nsim, "Replications")->capture_default_str();
  fstat->add_option("--seed", fstat_seed, "Seed (default: $SHARPIV_SEED or 1000)");
  fstat->add_flag("--identical", fo.identical, "Use A ~ Bern(0.25 Z) for both instruments");

  MarginOptions mo;
  auto* margin = app.add_subcommand("margin", "Margin curve P(|gamma - q| <= t) and a power-law fit");
  margin->add_option("--mu", mo.mu, "Strength")->capture_default_str();
  margin->add_option("--psi", mo.psi, "Sharpness")->capture_default_str();
  margin->add_option("--tmax", mo.tmax, "Largest t")->capture_default_str();
  margin->add_option("--points", mo.points, "Grid points")->capture_default_str();
  margin->add_flag("--uniform", mo.uniform, "Uniform scores instead of the probit model");
  margin->add_option("--alpha", mo.alpha, "Also report the smallest C for this exponent");
  margin->add_option("--out,-o", mo.out_path, "CSV output path");

  GenerateOptions go;
  auto* generate = app.add_subcommand("generate", "Write one simulated dataset to CSV");
  generate->add_option("--mu", go.mu, "Strength")->capture_default_str();
  generate->add_option("--psi", go.psi, "Sharpness")->capture_default_str();
  generate->add_option("--beta", go.beta, "Treatment effect")->capture_default_str();
  generate->add_option("--n", go.n, "Sample size")->capture_default_str();
  generate->add_option("--seed", go.seed, "Seed (default: $SHARPIV_SEED or 0)");
  generate->add_option("--out,-o", go.out_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*analyze) return cmd_analyze(ao, out, err);
    if (*simulate) return cmd_simulate(so, out);
    if (*solve) return cmd_dgp_solve(vo, out);
    if (*fstat) {
      fo.seed = fstat_seed ? *fstat_seed : env_seed(1000);
      return cmd_fstat(fo, out);
    }
    if (*margin) return cmd_margin(mo, out);
    if (*generate) return cmd_generate(go, out);
  } catch (const ValidationError& e) {
    report_error(err, "validation", e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    report_error(err, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitNumerical;
  }
  return kExitValidation;
}

}  // namespace sharpiv::cli
