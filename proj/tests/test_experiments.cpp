#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "interplab/experiments.hpp"

using namespace interplab;

namespace {

ExperimentConfig smoke_figure1() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::figure1;
  cfg.trials = 6;
  cfg.master_seed = 12345;
  cfg.n = 12;
  cfg.sigma_sq = 0.5;
  cfg.d_grid = {6, 12, 24, 48};
  cfg.cov.kind = "figure1";
  cfg.cov.lambda = 1.0;
  cfg.w_star.kind = "e1_scaled";
  cfg.w_star.value = 1.0 / std::sqrt(2.0);
  return cfg;
}

}  // namespace

TEST_CASE("figure1 schema, landmarks and sentinel rows") {
  const ExperimentConfig cfg = smoke_figure1();
  const Figure1Output out = run_figure1(cfg);

  // Golden schema pin.
  CHECK(out.table.schema == "interplab figure1 v1");
  const std::vector<std::string> header = {"d", "trial", "loss", "bound",
                                           "null", "bayes", "norm_sq"};
  CHECK(out.table.header == header);
  REQUIRE(out.table.rows.size() == 4 * 6);

  for (const auto& row : out.table.rows) {
    CHECK(row[4] == "1");    // null risk = sigma^2 + ||w*||_Sigma^2 = 1 exactly
    CHECK(row[5] == "0.5");  // bayes risk
    const long d = std::stol(row[0]);
    if (d < cfg.n) {
      CHECK(row[2] == std::string(kInfeasibleCell));
    } else {
      CHECK(row[2] != std::string(kInfeasibleCell));
    }
  }
  CHECK(out.svg.find("<svg") == 0);
}

TEST_CASE("figure1 output is byte-identical across thread counts") {
  ExperimentConfig cfg = smoke_figure1();
  cfg.threads = 1;
  const Figure1Output one = run_figure1(cfg);
  cfg.threads = 8;
  const Figure1Output eight = run_figure1(cfg);
  CHECK(one.table.to_csv() == eight.table.to_csv());
  CHECK(one.svg == eight.svg);
}

TEST_CASE("bound check coverage output") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::bound_check;
  cfg.trials = 40;
  cfg.delta = 0.1;
  cfg.master_seed = 777;
  cfg.n = 16;
  cfg.sigma_sq = 1.0;
  cfg.d_grid = {16 * 16 + 1};
  cfg.cov.kind = "spiked";
  cfg.cov.spike = 1.0;
  cfg.cov.tail_coeff = 5.0;
  cfg.w_star.kind = "e1_scaled";
  cfg.w_star.value = 1.0;
  cfg.mc_samples = 2000;
  cfg.threads = 2;
  const BoundCheckOutput out = run_bound_check(cfg);
  CHECK(out.table.schema == "interplab bound_check v1");
  CHECK(out.coverage_gen >= 0.0);
  CHECK(out.coverage_gen <= 1.0);
  CHECK(out.se_gen >= 0.0);
  CHECK(out.se_gen <= 0.5);
  CHECK(out.coverage_norm >= 0.0);
  CHECK(out.coverage_norm <= 1.0);
  // The desk-scale constants make the bound loose: coverage should be high.
  CHECK(out.coverage_gen >= 0.9);

  // Determinism across thread counts.
  ExperimentConfig cfg1 = cfg;
  cfg1.threads = 1;
  const BoundCheckOutput again = run_bound_check(cfg1);
  CHECK(again.table.to_csv() == out.table.to_csv());
  CHECK(again.summary.to_csv() == out.summary.to_csv());
}

TEST_CASE("cgmt check passes on a smoke instance") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::cgmt_check;
  cfg.trials = 1;
  cfg.delta = 0.1;
  cfg.master_seed = 31;
  cfg.n = 6;
  cfg.sigma_sq = 1.0;
  cfg.d_grid = {12};
  cfg.cov.kind = "identity";
  cfg.w_star.kind = "e1_scaled";
  cfg.w_star.value = 0.5;
  cfg.draws = 500;
  cfg.threads = 2;
  const CgmtCheckOutput out = run_cgmt_check(cfg);
  CHECK(out.gap.all_pass);
  CHECK(out.norm_l2.all_pass);
  CHECK(out.norm_l1.all_pass);
  CHECK(out.norm_l2.ao_is_upper_bound);
  CHECK(out.table.schema == "interplab cgmt_check v1");
  CHECK(out.table.rows.size() == 60);  // three pairs, twenty grid points each
}

TEST_CASE("ranks and split scan runners") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::ranks;
  cfg.trials = 1;
  cfg.delta = 0.1;
  cfg.n = 8;
  cfg.d_grid = {32, 64};
  cfg.cov.kind = "identity";
  cfg.norm = Norm::L2;
  cfg.mc_samples = 2000;
  const RanksOutput ranks = run_ranks(cfg);
  CHECK(ranks.table.schema == "interplab ranks v1");
  REQUIRE(ranks.table.rows.size() == 2);
  CHECK(std::stod(ranks.table.rows[0][1]) == doctest::Approx(32.0));

  ExperimentConfig scan;
  scan.experiment = ExperimentKind::split_scan;
  scan.trials = 1;
  scan.delta = 0.1;
  scan.n = 8;
  scan.d_grid = {32};
  scan.cov.kind = "spiked";
  scan.cov.spike = 50.0;
  scan.cov.tail_coeff = 8.0;
  scan.w_star.kind = "zero";
  scan.bound_family = "euclid_risk";
  scan.mc_samples = 500;
  const SplitScanOutput sres = run_split_scan(scan);
  CHECK(sres.table.schema == "interplab split_scan v1");
  CHECK(sres.k_star >= 0);
  long starred = 0;
  for (const auto& row : sres.table.rows) starred += row[3] == "1" ? 1 : 0;
  CHECK(starred == 1);
}

TEST_CASE("junk and isotropic bp runners (smoke scale)") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::junk_features;
  cfg.trials = 3;
  cfg.delta = 0.1;
  cfg.master_seed = 5;
  cfg.n = 8;
  cfg.sigma_sq = 0.25;
  cfg.d_grid = {64, 256};
  cfg.cov.kind = "junk";
  cfg.cov.lambda = 1.0;
  cfg.cov.signal_var = 1.0;
  cfg.w_star.kind = "e1_scaled";
  cfg.w_star.value = 1.0;
  cfg.mc_samples = 1000;
  cfg.threads = 2;
  const JunkOutput junk = run_junk_features(cfg);
  CHECK(junk.table.schema == "interplab junk_features v1");
  REQUIRE(junk.summaries.size() == 2);
  CHECK(junk.summaries[0].ratio_rank1_over_n == doctest::Approx(1.0 / 8.0));
  CHECK(junk.summaries[1].r1 > junk.summaries[0].r1);  // r1 grows with d

  ExperimentConfig iso;
  iso.experiment = ExperimentKind::isotropic_bp;
  iso.trials = 3;
  iso.delta = 0.1;
  iso.master_seed = 6;
  iso.n = 8;
  iso.sigma_sq = 0.25;
  iso.d_grid = {256};
  iso.cov.kind = "identity";
  iso.w_star.kind = "first_k";
  iso.w_star.k = 1;
  iso.w_star.value = 1.0;
  iso.mc_samples = 1000;
  iso.threads = 2;
  const IsoBpOutput ib = run_isotropic_bp(iso);
  CHECK(ib.table.schema == "interplab isotropic_bp v1");
  REQUIRE(ib.summaries.size() == 1);
  CHECK(ib.summaries[0].null_risk == doctest::Approx(0.25 + 1.0));
}

TEST_CASE("run_and_write produces files and a config echo") {
  ExperimentConfig cfg = smoke_figure1();
  cfg.out_dir = "test_out_figure1";
  const std::vector<std::string> files = run_and_write(cfg);
  REQUIRE(files.size() == 3);  // csv, svg, config echo
  // The echo parses back to the same map.
  const ConfigMap echo = ConfigMap::load_file(files.back());
  CHECK(echo == cfg.to_map());
}
