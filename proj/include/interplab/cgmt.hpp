#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "interplab/common.hpp"
#include "interplab/model.hpp"

namespace interplab {

// Gap-problem primary value: max L(w) - sigma^2 over the l2 ball of radius B
// intersected with the interpolators of a fresh dataset. Empty feasible set
// gives the -inf sentinel (max over the empty set).
ExtReal po_gap_value(const ProblemSpec& spec, Norm norm, double B, std::uint64_t seed);

// Gap-problem auxiliary value: max ||w2||^2 over w2 in Sigma^{1/2}(K - w*)
// subject to ||xi - ||w2|| G|| <= <w2, H>, via a 1-D scan over rho = ||w2||
// with the inner support maximization restricted to span{S^{1/2}H, S^{1/2}w*}
// (exact when Sigma is a multiple of the identity).
ExtReal ao_gap_value(const ProblemSpec& spec, Norm norm, double B, std::uint64_t seed);

// Norm-problem primary value: minimum norm interpolation of pure noise after
// the whitening change of variables. Infeasible gives +inf (min over empty).
ExtReal po_norm_value(const ProblemSpec& spec, Norm norm, std::uint64_t seed);

// Norm-problem auxiliary value: the constructive feasible point alpha v* with
// alpha^2 = sigma^2 (||Sigma^{1/2}H||_*^2/n - ||v*||_Sigma^2)^{-1}. This is an
// upper bound on the auxiliary optimum, +inf when the construction is
// infeasible.
ExtReal ao_norm_value(const ProblemSpec& spec, Norm norm, std::uint64_t seed);

struct TailPoint {
  double t = 0.0;
  double po_tail = 0.0, po_se = 0.0;
  double ao_tail = 0.0, ao_se = 0.0;
  bool pass = true;
};

struct ComparisonReport {
  std::vector<TailPoint> points;
  long draws = 0;
  bool all_pass = true;
  bool ao_is_upper_bound = false;  // set when the AO sampler overestimates phi
};

using ValueSampler = std::function<ExtReal(std::uint64_t draw_seed)>;

// Estimates Pr(PO > t) and Pr(AO >= t) on the grid and checks
// po_tail <= 2 ao_tail + 3 SE(po - 2 ao) pointwise. An empty grid is replaced
// by 20 points spanning the pooled finite sample range.
ComparisonReport compare_tails(const ValueSampler& po, const ValueSampler& ao, long draws,
                               std::vector<double> t_grid, std::uint64_t seed,
                               int n_threads = 1);

}  // namespace interplab
