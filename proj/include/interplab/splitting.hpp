#pragma once

#include <vector>

#include "interplab/bounds.hpp"
#include "interplab/common.hpp"
#include "interplab/model.hpp"

namespace interplab {

enum class BoundFamily { main, euclid_risk, general_risk, bp_risk };

const char* bound_family_name(BoundFamily f);
BoundFamily parse_bound_family(const std::string& s);

// Top-k split of the sorted spectrum (ties resolved by the stored order,
// i.e. lowest index first).
CovSplit split_top_k(const CovarianceModel& cov, Index k);

struct SplitScanEntry {
  Index k = 0;
  BoundReport report;
};

struct OptimizeSplitResult {
  Index k_star = 0;
  BoundReport report;
  bool used_invalid_fallback = false;  // no validity-flagged candidate existed
  std::vector<SplitScanEntry> scan;
};

// Scans k in 0..min(d, n), evaluates the chosen bound at each top-k split
// (widths cached across k), and returns the smallest-k minimizer among
// validity-flagged entries, falling back to the global minimum.
OptimizeSplitResult optimize_split(const ProblemSpec& spec, double delta, BoundFamily family,
                                   Norm norm, double B, const McSettings& mc = {},
                                   BoundVariant variant = BoundVariant::appendix_sharp);

struct TauSplitInfo {
  double a = 0.0;    // ||v_k||_1^2 / ||v_k||_2^2
  double b = 0.0;    // ||v_k||_1 / ||v_k||_inf
  double tau = 0.0;  // (b/a) (a/n)^{3/4}
  std::vector<Index> s_tau;
  double tail_l1 = 0.0;        // ||v_k||_1
  double kept_l1 = 0.0;        // ||v_{k,tau}||_1
  CovSplit split;              // top-k indices plus S_tau
};

// Threshold split: after removing the top-k eigenvalues, moves the tail
// entries >= tau * max(tail) into Sigma_1 as well, with tau chosen so that
// b/(tau a) = (n/a)^{3/4}.
TauSplitInfo tau_split_info(const CovarianceModel& cov, Index k, Index n);
CovSplit tau_split(const CovarianceModel& cov, Index k, Index n);

}  // namespace interplab
