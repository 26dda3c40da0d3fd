#pragma once

#include <string>
#include <vector>

#include "interplab/cgmt.hpp"
#include "interplab/config.hpp"
#include "interplab/csv.hpp"
#include "interplab/splitting.hpp"

namespace interplab {

struct Figure1Summary {
  Index d = 0;
  long interpolable = 0;
  double mean_loss = 0.0, std_loss = 0.0;
  double mean_bound = 0.0;
  double null_risk = 0.0, bayes_risk = 0.0;
};

struct Figure1Output {
  CsvTable table;
  std::string svg;
  std::vector<Figure1Summary> summaries;
};

Figure1Output run_figure1(const ExperimentConfig& cfg);

struct JunkSummary {
  Index d_junk = 0;
  double mean_loss = 0.0;
  double risk_bound = 0.0;
  double r1 = 0.0;
  double ratio_aliasing = 0.0, ratio_n_over_r1 = 0.0, ratio_rank1_over_n = 0.0;
};

struct JunkOutput {
  CsvTable table;
  std::vector<JunkSummary> summaries;
};

JunkOutput run_junk_features(const ExperimentConfig& cfg);

struct IsoBpSummary {
  Index d = 0;
  double mean_loss = 0.0;
  double bound = 0.0, eta = 0.0, null_risk = 0.0;
  double coverage = 0.0;
};

struct IsoBpOutput {
  CsvTable table;
  std::vector<IsoBpSummary> summaries;
};

IsoBpOutput run_isotropic_bp(const ExperimentConfig& cfg);

struct BoundCheckOutput {
  CsvTable table;
  CsvTable summary;
  long trials = 0;
  double coverage_gen = 0.0, se_gen = 0.0;
  double coverage_norm = 0.0, se_norm = 0.0;
  double norm_bound_value = 0.0;
  bool scan_all_invalid = false;
};

BoundCheckOutput run_bound_check(const ExperimentConfig& cfg);

struct CgmtCheckOutput {
  CsvTable table;
  ComparisonReport gap;
  ComparisonReport norm_l2;
  ComparisonReport norm_l1;
  double gap_ball_radius = 0.0;
};

CgmtCheckOutput run_cgmt_check(const ExperimentConfig& cfg);

struct RanksOutput {
  CsvTable table;
};

RanksOutput run_ranks(const ExperimentConfig& cfg);

struct SplitScanOutput {
  CsvTable table;
  Index k_star = 0;
  bool used_invalid_fallback = false;
};

SplitScanOutput run_split_scan(const ExperimentConfig& cfg);

// Runs the configured experiment and writes outputs (tables, figure, config
// echo) under cfg.out_dir. Returns the file paths written.
std::vector<std::string> run_and_write(const ExperimentConfig& cfg);

}  // namespace interplab
