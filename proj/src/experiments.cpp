#include "interplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "interplab/interpolators.hpp"
#include "interplab/rng.hpp"
#include "interplab/svg.hpp"

namespace interplab {

namespace {

int resolve_threads(const ExperimentConfig& cfg) {
  return cfg.threads > 0 ? cfg.threads : default_thread_count();
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string(kInfeasibleCell);
}

double binom_se(double p, long n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

struct MeanStd {
  double mean = 0.0, stddev = 0.0;
  long count = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.count = static_cast<long>(xs.size());
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double acc = 0.0;
  for (double x : xs) acc += (x - out.mean) * (x - out.mean);
  out.stddev = xs.size() > 1 ? std::sqrt(acc / (xs.size() - 1)) : 0.0;
  return out;
}

}  // namespace

Figure1Output run_figure1(const ExperimentConfig& cfg) {
  const int threads = resolve_threads(cfg);
  const long trials = cfg.trials;

  struct Row {
    Index d = 0;
    long trial = 0;
    std::optional<double> loss, bound, norm_sq;
    double null_risk = 0.0, bayes = 0.0;
  };

  std::vector<ProblemSpec> specs;
  specs.reserve(cfg.d_grid.size());
  for (Index d : cfg.d_grid) specs.push_back(make_problem_spec(cfg, d));

  std::vector<Row> rows(cfg.d_grid.size() * trials);
  parallel_for(static_cast<Index>(rows.size()), threads, [&](Index task) {
    const std::size_t di = static_cast<std::size_t>(task) / trials;
    const long trial = static_cast<long>(task % trials);
    const ProblemSpec& spec = specs[di];
    Row& row = rows[task];
    row.d = cfg.d_grid[di];
    row.trial = trial;
    row.null_risk = population_loss(spec, VectorXd::Zero(spec.dim()));
    row.bayes = spec.sigma * spec.sigma;
    if (row.d < spec.n) return;  // almost surely no interpolators below d = n
    const Dataset ds = sample_dataset(
        spec, Rng::derive(cfg.master_seed, {static_cast<std::uint64_t>(di),
                                            static_cast<std::uint64_t>(trial)}));
    try {
      const InterpolatorResult fit = min_l2_interpolator(spec, ds);
      row.loss = fit.pop_loss;
      row.norm_sq = fit.norm_value * fit.norm_value;
      row.bound = *row.norm_sq * spec.cov.trace() / static_cast<double>(spec.n);
    } catch (const LabError&) {
      // Rank-deficient draw at the interpolation threshold; leave the
      // sentinel cells in place.
    }
  });

  Figure1Output out;
  out.table.schema = "interplab figure1 v1";
  out.table.header = {"d", "trial", "loss", "bound", "null", "bayes", "norm_sq"};
  for (const Row& row : rows) {
    out.table.rows.push_back({std::to_string(row.d), std::to_string(row.trial),
                              opt_cell(row.loss), opt_cell(row.bound),
                              format_double(row.null_risk), format_double(row.bayes),
                              opt_cell(row.norm_sq)});
  }

  SvgSeries loss_series{"loss", "#c0392b", {}, {}, {}};
  SvgSeries bound_series{"bound", "#2980b9", {}, {}, {}};
  SvgSeries null_series{"null", "#7f8c8d", {}, {}, {}};
  SvgSeries bayes_series{"bayes", "#27ae60", {}, {}, {}};
  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    std::vector<double> losses, bounds;
    for (long t = 0; t < trials; ++t) {
      const Row& row = rows[di * trials + t];
      if (row.loss) losses.push_back(*row.loss);
      if (row.bound) bounds.push_back(*row.bound);
    }
    Figure1Summary s;
    s.d = cfg.d_grid[di];
    s.interpolable = static_cast<long>(losses.size());
    s.null_risk = rows[di * trials].null_risk;
    s.bayes_risk = rows[di * trials].bayes;
    const MeanStd ml = mean_std(losses);
    const MeanStd mb = mean_std(bounds);
    s.mean_loss = ml.mean;
    s.std_loss = ml.stddev;
    s.mean_bound = mb.mean;
    out.summaries.push_back(s);
    const double x = static_cast<double>(s.d);
    if (!losses.empty()) {
      loss_series.x.push_back(x);
      loss_series.mean.push_back(ml.mean);
      loss_series.std_dev.push_back(ml.stddev);
      bound_series.x.push_back(x);
      bound_series.mean.push_back(mb.mean);
      bound_series.std_dev.push_back(mb.stddev);
    }
    null_series.x.push_back(x);
    null_series.mean.push_back(s.null_risk);
    null_series.std_dev.push_back(0.0);
    bayes_series.x.push_back(x);
    bayes_series.mean.push_back(s.bayes_risk);
    bayes_series.std_dev.push_back(0.0);
  }

  SvgPlotSpec plot;
  plot.title = "Minimum-norm interpolation: population loss vs dimension";
  plot.x_label = "d (log scale)";
  plot.y_label = "population loss (log scale)";
  plot.log_x = true;
  plot.log_y = true;
  plot.vline_x = static_cast<double>(cfg.n);
  plot.series = {loss_series, bound_series, null_series, bayes_series};
  out.svg = render_line_plot(plot);
  return out;
}

JunkOutput run_junk_features(const ExperimentConfig& cfg) {
  const int threads = resolve_threads(cfg);
  const long trials = cfg.trials;
  const McSettings mc{cfg.mc_samples, Rng::derive(cfg.master_seed, {0xA0})};

  JunkOutput out;
  out.table.schema = "interplab junk_features v1";
  out.table.header = {"d_junk", "trial",        "loss",         "rank1",
                      "risk_bound", "r1",       "ratio_aliasing", "ratio_n_over_r1",
                      "ratio_rank1_over_n"};

  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const Index d_junk = cfg.d_grid[di];
    const ProblemSpec spec = make_problem_spec(cfg, d_junk);
    const CovSplit split = split_top_k(spec.cov, 1);  // the signal block
    const double b_floor = std::max(1.0, spec.w_star.lpNorm<1>());
    const BpSuite suite = bp_suite(spec, split, b_floor, cfg.delta, mc);
    const double width2 = suite.gen.terms.at("width");
    const double r1 = suite.gen.terms.at("r1");

    JunkSummary s;
    s.d_junk = d_junk;
    s.risk_bound = suite.risk.value;
    s.r1 = r1;
    s.ratio_aliasing = spec.w_star.lpNorm<1>() * width2 / std::sqrt(double(spec.n));
    s.ratio_n_over_r1 = static_cast<double>(spec.n) / r1;
    s.ratio_rank1_over_n = 1.0 / static_cast<double>(spec.n);

    std::vector<double> losses(trials, 0.0);
    std::vector<char> ok(trials, 1);
    parallel_for(trials, threads, [&](Index t) {
      const Dataset ds = sample_dataset(
          spec, Rng::derive(cfg.master_seed, {0xA1, static_cast<std::uint64_t>(di),
                                              static_cast<std::uint64_t>(t)}));
      try {
        const InterpolatorResult fit = min_l1_interpolator(spec, ds);
        losses[t] = fit.pop_loss;
      } catch (const LabError&) {
        ok[t] = 0;
      }
    });

    std::vector<double> good;
    for (long t = 0; t < trials; ++t) {
      out.table.rows.push_back({std::to_string(d_junk), std::to_string(t),
                                ok[t] ? format_double(losses[t]) : kInfeasibleCell, "1",
                                format_double(s.risk_bound), format_double(s.r1),
                                format_double(s.ratio_aliasing),
                                format_double(s.ratio_n_over_r1),
                                format_double(s.ratio_rank1_over_n)});
      if (ok[t]) good.push_back(losses[t]);
    }
    s.mean_loss = mean_std(good).mean;
    out.summaries.push_back(s);
  }
  return out;
}

IsoBpOutput run_isotropic_bp(const ExperimentConfig& cfg) {
  const int threads = resolve_threads(cfg);
  const long trials = cfg.trials;
  const McSettings mc{cfg.mc_samples, Rng::derive(cfg.master_seed, {0xB0})};

  IsoBpOutput out;
  out.table.schema = "interplab isotropic_bp v1";
  out.table.header = {"d", "trial", "loss", "e5_bound", "eta", "null_risk", "covered"};

  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const Index d = cfg.d_grid[di];
    const ProblemSpec spec = make_problem_spec(cfg, d);
    if (cfg.cov.kind != "identity")
      throw ConfigError("field 'covariance.kind': isotropic_bp requires identity");
    const BoundReport e5 = bp_iso_risk(spec, cfg.delta, mc);

    std::vector<double> losses(trials, 0.0);
    std::vector<char> ok(trials, 1);
    parallel_for(trials, threads, [&](Index t) {
      const Dataset ds = sample_dataset(
          spec, Rng::derive(cfg.master_seed, {0xB1, static_cast<std::uint64_t>(di),
                                              static_cast<std::uint64_t>(t)}));
      try {
        losses[t] = min_l1_interpolator(spec, ds).pop_loss;
      } catch (const LabError&) {
        ok[t] = 0;
      }
    });

    IsoBpSummary s;
    s.d = d;
    s.bound = e5.value;
    s.eta = e5.terms.at("eta");
    s.null_risk = e5.terms.at("null_risk");
    long covered = 0, good = 0;
    std::vector<double> good_losses;
    for (long t = 0; t < trials; ++t) {
      const bool cov_t = ok[t] && losses[t] <= e5.value;
      out.table.rows.push_back({std::to_string(d), std::to_string(t),
                                ok[t] ? format_double(losses[t]) : kInfeasibleCell,
                                format_double(e5.value), format_double(s.eta),
                                format_double(s.null_risk), cov_t ? "1" : "0"});
      if (ok[t]) {
        ++good;
        good_losses.push_back(losses[t]);
        covered += cov_t ? 1 : 0;
      }
    }
    s.mean_loss = mean_std(good_losses).mean;
    s.coverage = good > 0 ? static_cast<double>(covered) / good : 0.0;
    out.summaries.push_back(s);
  }
  return out;
}

BoundCheckOutput run_bound_check(const ExperimentConfig& cfg) {
  const int threads = resolve_threads(cfg);
  const long trials = cfg.trials;
  const Index d = cfg.d_grid.front();
  const ProblemSpec spec = make_problem_spec(cfg, d);
  const Index k_max = std::min(spec.dim(), spec.n);

  // Per-k caches shared across trials; the bound at (k, B) is
  // (1+beta_k)/n (B w_k + (B rad_k + sig_k) c)^2.
  const std::vector<WidthEstimate> widths = width_table_top_k(
      spec.cov, cfg.norm, k_max, cfg.mc_samples, Rng::derive(cfg.master_seed, {0xBC}));
  std::vector<double> beta(k_max + 1), rad_unit(k_max + 1), signal(k_max + 1);
  for (Index k = 0; k <= k_max; ++k) {
    const CovSplit split = split_top_k(spec.cov, k);
    const CovView part2 = part2_view(spec.cov, split);
    beta[k] = beta_value(cfg.variant, cfg.delta, spec.n, k);
    rad_unit[k] = radius(part2, cfg.norm, 1.0);
    signal[k] = part2.mahalanobis(spec.w_star);
  }
  const double log_factor = std::sqrt(2.0 * std::log(32.0 / cfg.delta));
  const double nn = static_cast<double>(spec.n);
  const bool any_valid_k = *std::min_element(beta.begin(), beta.end()) <= 1.0;

  // Norm bound (fixed split from config; independent of the trial draw).
  const CovSplit norm_split = split_top_k(spec.cov, std::min<Index>(cfg.split_k, spec.dim()));
  const EuclidSuite norm_suite =
      euclid_suite(spec, norm_split, std::max(1.0, spec.w_star.norm()), cfg.delta, cfg.variant);

  struct Row {
    double loss = 0.0, norm_w = 0.0, gen_bound = 0.0;
    Index k_star = 0;
    bool gen_covered = false, norm_covered = false, ok = true;
  };
  std::vector<Row> rows(trials);
  parallel_for(trials, threads, [&](Index t) {
    Row& row = rows[t];
    const Dataset ds = sample_dataset(
        spec, Rng::derive(cfg.master_seed, {0xBD, static_cast<std::uint64_t>(t)}));
    try {
      const InterpolatorResult fit = min_l2_interpolator(spec, ds);
      row.loss = fit.pop_loss;
      row.norm_w = fit.norm_value;
      const double B = fit.norm_value;
      double best = std::numeric_limits<double>::infinity();
      double best_valid = std::numeric_limits<double>::infinity();
      Index best_k = 0, best_valid_k = -1;
      for (Index k = 0; k <= k_max; ++k) {
        const double s = B * widths[k].mean + (B * rad_unit[k] + signal[k]) * log_factor;
        const double val = (1.0 + beta[k]) / nn * s * s;
        if (val < best) {
          best = val;
          best_k = k;
        }
        if (beta[k] <= 1.0 && val < best_valid) {
          best_valid = val;
          best_valid_k = k;
        }
      }
      row.k_star = best_valid_k >= 0 ? best_valid_k : best_k;
      row.gen_bound = best_valid_k >= 0 ? best_valid : best;
      row.gen_covered = row.loss <= row.gen_bound;
      row.norm_covered = row.norm_w <= norm_suite.norm.value;
    } catch (const LabError&) {
      row.ok = false;
    }
  });

  BoundCheckOutput out;
  out.trials = trials;
  out.scan_all_invalid = !any_valid_k;
  out.norm_bound_value = norm_suite.norm.value;
  out.table.schema = "interplab bound_check v1";
  out.table.header = {"trial",      "loss",        "gen_bound",  "k_star",
                      "gen_covered", "norm_w",     "norm_bound", "norm_covered"};
  long gen_hits = 0, norm_hits = 0, good = 0;
  for (long t = 0; t < trials; ++t) {
    const Row& row = rows[t];
    if (!row.ok) {
      out.table.rows.push_back({std::to_string(t), kInfeasibleCell, kInfeasibleCell, "-1", "0",
                                kInfeasibleCell, format_double(norm_suite.norm.value), "0"});
      continue;
    }
    ++good;
    gen_hits += row.gen_covered ? 1 : 0;
    norm_hits += row.norm_covered ? 1 : 0;
    out.table.rows.push_back({std::to_string(t), format_double(row.loss),
                              format_double(row.gen_bound), std::to_string(row.k_star),
                              row.gen_covered ? "1" : "0", format_double(row.norm_w),
                              format_double(norm_suite.norm.value),
                              row.norm_covered ? "1" : "0"});
  }
  out.coverage_gen = good ? static_cast<double>(gen_hits) / good : 0.0;
  out.coverage_norm = good ? static_cast<double>(norm_hits) / good : 0.0;
  out.se_gen = binom_se(out.coverage_gen, good);
  out.se_norm = binom_se(out.coverage_norm, good);

  out.summary.schema = "interplab bound_check_summary v1";
  out.summary.header = {"metric", "value"};
  out.summary.rows = {
      {"trials", std::to_string(good)},
      {"coverage_gen", format_double(out.coverage_gen)},
      {"se_gen", format_double(out.se_gen)},
      {"coverage_norm", format_double(out.coverage_norm)},
      {"se_norm", format_double(out.se_norm)},
      {"target", format_double(1.0 - cfg.delta)},
      {"norm_bound", format_double(out.norm_bound_value)},
      {"scan_all_invalid", out.scan_all_invalid ? "1" : "0"},
  };
  return out;
}

CgmtCheckOutput run_cgmt_check(const ExperimentConfig& cfg) {
  const int threads = resolve_threads(cfg);
  const Index d = cfg.d_grid.front();
  const ProblemSpec spec = make_problem_spec(cfg, d);

  // Ball radius for the gap pair: a multiple of the typical minimum norm.
  std::vector<double> pilot;
  for (int i = 0; i < 64; ++i) {
    const Dataset ds =
        sample_dataset(spec, Rng::derive(cfg.master_seed, {0xC0, static_cast<std::uint64_t>(i)}));
    try {
      pilot.push_back(min_l2_interpolator(ds).norm_value);
    } catch (const LabError&) {
    }
  }
  if (pilot.empty()) throw LabError("cgmt_check: no pilot draw admitted an interpolator");
  std::sort(pilot.begin(), pilot.end());
  const double typical = pilot[pilot.size() / 2];
  const double B = cfg.b_scale * typical;

  CgmtCheckOutput out;
  out.gap_ball_radius = B;

  const ValueSampler po_gap = [&](std::uint64_t s) { return po_gap_value(spec, Norm::L2, B, s); };
  const ValueSampler ao_gap = [&](std::uint64_t s) { return ao_gap_value(spec, Norm::L2, B, s); };
  out.gap = compare_tails(po_gap, ao_gap, cfg.draws, {}, Rng::derive(cfg.master_seed, {0xC1}),
                          threads);

  const auto norm_pair = [&](Norm norm, std::uint64_t label) {
    const ValueSampler po = [&spec, norm](std::uint64_t s) {
      return po_norm_value(spec, norm, s);
    };
    const ValueSampler ao = [&spec, norm](std::uint64_t s) {
      return ao_norm_value(spec, norm, s);
    };
    ComparisonReport rep = compare_tails(po, ao, cfg.draws, {},
                                         Rng::derive(cfg.master_seed, {0xC2, label}), threads);
    rep.ao_is_upper_bound = true;  // constructive feasible point, not the exact minimum
    return rep;
  };
  out.norm_l2 = norm_pair(Norm::L2, 2);
  out.norm_l1 = norm_pair(Norm::L1, 1);

  out.table.schema = "interplab cgmt_check v1";
  out.table.header = {"pair", "t", "po_tail", "po_se", "ao_tail", "ao_se", "pass"};
  const auto emit = [&](const char* name, const ComparisonReport& rep) {
    for (const TailPoint& pt : rep.points) {
      out.table.rows.push_back({name, format_double(pt.t), format_double(pt.po_tail),
                                format_double(pt.po_se), format_double(pt.ao_tail),
                                format_double(pt.ao_se), pt.pass ? "1" : "0"});
    }
  };
  emit("gap", out.gap);
  emit("norm_l2", out.norm_l2);
  emit("norm_l1", out.norm_l1);
  return out;
}

RanksOutput run_ranks(const ExperimentConfig& cfg) {
  RanksOutput out;
  out.table.schema = "interplab ranks v1";
  out.table.header = {"d",      "r",          "R",          "r_norm", "R_norm",
                      "r_norm_err", "R_norm_err", "r1",     "width",  "width_se"};
  for (std::size_t di = 0; di < cfg.d_grid.size(); ++di) {
    const CovarianceModel cov = make_covariance(cfg, cfg.d_grid[di]);
    const RankReport rep = effective_ranks_general(
        cov, cfg.norm, cfg.mc_samples,
        Rng::derive(cfg.master_seed, {0xD0, static_cast<std::uint64_t>(di)}));
    out.table.rows.push_back(
        {std::to_string(cov.dim()), format_double(rep.r), format_double(rep.R),
         format_double(rep.r_norm), format_double(rep.R_norm), format_double(rep.r_norm_err),
         format_double(rep.R_norm_err), format_double(rep.r1), format_double(rep.width.mean),
         format_double(rep.width.std_error)});
  }
  return out;
}

SplitScanOutput run_split_scan(const ExperimentConfig& cfg) {
  const Index d = cfg.d_grid.front();
  const ProblemSpec spec = make_problem_spec(cfg, d);
  const McSettings mc{cfg.mc_samples, Rng::derive(cfg.master_seed, {0xE0})};
  const OptimizeSplitResult res = optimize_split(spec, cfg.delta, parse_bound_family(cfg.bound_family),
                                                 cfg.norm, cfg.b_radius, mc, cfg.variant);
  SplitScanOutput out;
  out.k_star = res.k_star;
  out.used_invalid_fallback = res.used_invalid_fallback;
  out.table.schema = "interplab split_scan v1";
  out.table.header = {"k", "value", "valid", "is_k_star"};
  for (const SplitScanEntry& e : res.scan) {
    out.table.rows.push_back({std::to_string(e.k), format_double(e.report.value),
                              e.report.valid ? "1" : "0", e.k == res.k_star ? "1" : "0"});
  }
  return out;
}

std::vector<std::string> run_and_write(const ExperimentConfig& cfg) {
  ensure_directory(cfg.out_dir);
  std::vector<std::string> written;
  const std::string stem = cfg.out_dir + "/" + experiment_name(cfg.experiment);
  const bool json = cfg.format == "json";
  const auto write_table = [&](const CsvTable& table, const std::string& base) {
    const std::string path = base + (json ? ".json" : ".csv");
    write_text_file(path, json ? table.to_json() : table.to_csv());
    written.push_back(path);
  };

  switch (cfg.experiment) {
    case ExperimentKind::figure1: {
      const Figure1Output out = run_figure1(cfg);
      write_table(out.table, stem);
      write_text_file(stem + ".svg", out.svg);
      written.push_back(stem + ".svg");
      break;
    }
    case ExperimentKind::junk_features: {
      write_table(run_junk_features(cfg).table, stem);
      break;
    }
    case ExperimentKind::isotropic_bp: {
      write_table(run_isotropic_bp(cfg).table, stem);
      break;
    }
    case ExperimentKind::bound_check: {
      const BoundCheckOutput out = run_bound_check(cfg);
      write_table(out.table, stem);
      write_table(out.summary, stem + "_summary");
      break;
    }
    case ExperimentKind::cgmt_check: {
      write_table(run_cgmt_check(cfg).table, stem);
      break;
    }
    case ExperimentKind::ranks: {
      write_table(run_ranks(cfg).table, stem);
      break;
    }
    case ExperimentKind::split_scan: {
      write_table(run_split_scan(cfg).table, stem);
      break;
    }
  }
  // Config echo: the exact parameters that produced the outputs, in the
  // round-trippable text form.
  const std::string echo_path = stem + "_config.cfg";
  write_text_file(echo_path, cfg.to_map().to_text());
  written.push_back(echo_path);
  return written;
}

}  // namespace interplab
