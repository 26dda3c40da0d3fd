#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interplab/common.hpp"
#include "interplab/complexity.hpp"
#include "interplab/model.hpp"

namespace interplab {

enum class BoundVariant { theorem, appendix_sharp };

const char* variant_name(BoundVariant v);

struct McSettings {
  long samples = 20000;
  std::uint64_t seed = 0x1ab5eedULL;
};

struct BoundReport {
  double value = 0.0;
  double delta = 0.0;
  BoundVariant variant = BoundVariant::theorem;
  std::map<std::string, double> terms;
  bool valid = true;                        // side conditions of the statement hold
  std::vector<std::string> validity_notes;  // which gates cleared the flag
  // MC-propagated interval (equals [value, value] for closed-form bounds).
  double value_lo = 0.0;
  double value_hi = 0.0;
};

// The beta of the main uniform-convergence bound. theorem: 66 (sqrt(log(1/d)/n)
// + sqrt(rank1/n)); appendix_sharp: 33 sqrt(log(32/d)/n) + 18 sqrt(rank1/n).
double beta_value(BoundVariant variant, double delta, Index n, Index rank1);

// Main bound: (1+beta)/n [ W(S2^{1/2}K) + (rad(S2^{1/2}K) + ||w*||_{S2})
// sqrt(2 log(32/delta)) ]^2 over the norm ball K of radius B.
BoundReport ucb_main(const ProblemSpec& spec, const CovSplit& split, Norm norm, double B,
                     double delta, BoundVariant variant, const McSettings& mc = {});

// Same evaluation from a precomputed unit width of Sigma_2 (B scales widths
// linearly); used by split scans and coverage experiments.
BoundReport ucb_main_from_width(const ProblemSpec& spec, const CovSplit& split, Norm norm,
                                double B, double delta, BoundVariant variant,
                                const WidthEstimate& unit_width);

// Speculative bound: (1+gamma) B^2 Tr(Sigma)/n with the proof's explicit
// gamma and rank(Sigma_1) = ceil(sqrt(n log(32/delta))).
BoundReport ucb_spec(const ProblemSpec& spec, double B, double delta,
                     BoundVariant variant = BoundVariant::appendix_sharp);

struct EuclidSuite {
  BoundReport gen;   // (1+gamma) B^2 Tr(Sigma_2)/n
  BoundReport norm;  // ||w*||_2 + (1+eps)^{1/2} sigma sqrt(n/Tr(Sigma_2))
  BoundReport risk;  // (1+gamma)(1+eps)(sigma + ||w*||_2 sqrt(Tr(Sigma_2)/n))^2
};

EuclidSuite euclid_suite(const ProblemSpec& spec, const CovSplit& split, double B, double delta,
                         BoundVariant variant, double c2_surrogate = 64.0);

struct GeneralSuite {
  BoundReport gen;
  BoundReport norm_bound;
  BoundReport risk;
  double eps1 = 0.0, eps2 = 0.0;
};

GeneralSuite general_norm_suite(const ProblemSpec& spec, const CovSplit& split, Norm norm,
                                double B, double delta, const McSettings& mc,
                                std::optional<double> eps1 = std::nullopt,
                                std::optional<double> eps2 = std::nullopt);

struct BpSuite {
  BoundReport gen;         // l1-ball generalization bound
  BoundReport norm_bound;  // ||w*||_1 + (1+eps)^{1/2} sigma sqrt(n)/E||S2^{1/2}H||_inf
  BoundReport risk;
  BoundReport iso_norm;    // isotropic support-splitting norm bound (Sigma = I only)
};

BpSuite bp_suite(const ProblemSpec& spec, const CovSplit& split, double B, double delta,
                 const McSettings& mc);

// Isotropic basis-pursuit risk bound (1+eta)(sigma^2 + ||w*||_2^2) with
// eta = 368(sqrt(log(1/d)/n) + sqrt((log(1/d)+log|S|)/log(d-|S|)) + n/log(d-|S|)).
BoundReport bp_iso_risk(const ProblemSpec& spec, double delta, const McSettings& mc);

struct ConsistencyRow {
  Index n = 0;
  std::map<std::string, double> ratios;
};

struct ConsistencyTable {
  std::vector<ConsistencyRow> rows;
  std::map<std::string, bool> decreasing;  // monotone-trend verdict per column
};

ConsistencyTable consistency_diagnostics(const std::vector<std::pair<ProblemSpec, CovSplit>>& seq,
                                         Norm norm, const McSettings& mc = {});

}  // namespace interplab
