#include "interplab/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace interplab {

const char* bound_family_name(BoundFamily f) {
  switch (f) {
    case BoundFamily::main: return "main";
    case BoundFamily::euclid_risk: return "euclid_risk";
    case BoundFamily::general_risk: return "general_risk";
    default: return "bp_risk";
  }
}

BoundFamily parse_bound_family(const std::string& s) {
  if (s == "main") return BoundFamily::main;
  if (s == "euclid_risk") return BoundFamily::euclid_risk;
  if (s == "general_risk") return BoundFamily::general_risk;
  if (s == "bp_risk") return BoundFamily::bp_risk;
  throw ConfigError("unknown bound family: " + s);
}

CovSplit split_top_k(const CovarianceModel& cov, Index k) {
  if (k < 0 || k > cov.dim()) throw KOutOfRange("split_top_k: k outside [0, d]");
  std::vector<Index> sel(static_cast<std::size_t>(k));
  std::iota(sel.begin(), sel.end(), Index{0});
  return CovSplit::of(cov, std::move(sel));
}

OptimizeSplitResult optimize_split(const ProblemSpec& spec, double delta, BoundFamily family,
                                   Norm norm, double B, const McSettings& mc,
                                   BoundVariant variant) {
  const Index k_max = std::min(spec.dim(), spec.n);
  OptimizeSplitResult out;
  out.scan.reserve(k_max + 1);

  std::vector<WidthEstimate> widths;
  if (family == BoundFamily::main) {
    widths = width_table_top_k(spec.cov, norm, k_max, mc.samples, mc.seed);
  }

  for (Index k = 0; k <= k_max; ++k) {
    const CovSplit split = split_top_k(spec.cov, k);
    BoundReport rep;
    try {
      switch (family) {
        case BoundFamily::main:
          rep = ucb_main_from_width(spec, split, norm, B, delta, variant, widths[k]);
          break;
        case BoundFamily::euclid_risk:
          rep = euclid_suite(spec, split, B, delta, variant).risk;
          break;
        case BoundFamily::general_risk:
          rep = general_norm_suite(spec, split, norm, B, delta, mc).risk;
          break;
        case BoundFamily::bp_risk:
          rep = bp_suite(spec, split, B, delta, mc).risk;
          break;
      }
    } catch (const ZeroCovariance&) {
      continue;  // k = d leaves an empty tail for the risk families
    }
    out.scan.push_back({k, std::move(rep)});
  }
  if (out.scan.empty()) throw LabError("optimize_split: no evaluable split");

  const SplitScanEntry* best_valid = nullptr;
  const SplitScanEntry* best_any = nullptr;
  for (const auto& entry : out.scan) {
    if (!best_any || entry.report.value < best_any->report.value) best_any = &entry;
    if (entry.report.valid && (!best_valid || entry.report.value < best_valid->report.value))
      best_valid = &entry;
  }
  const SplitScanEntry* chosen = best_valid ? best_valid : best_any;
  out.used_invalid_fallback = best_valid == nullptr;
  out.k_star = chosen->k;
  out.report = chosen->report;
  return out;
}

TauSplitInfo tau_split_info(const CovarianceModel& cov, Index k, Index n) {
  if (k < 0 || k > cov.dim()) throw KOutOfRange("tau_split: k outside [0, d]");
  if (n < 1) throw LabError("tau_split needs n >= 1");
  const VectorXd& eigs = cov.eigenvalues();
  const Index d = cov.dim();
  const Index m = d - k;
  TauSplitInfo info;
  if (m <= 0) throw DegenerateTail("tau_split: empty tail");
  const VectorXd tail = eigs.tail(m);
  const double l1 = tail.lpNorm<1>();
  const double l2sq = tail.squaredNorm();
  const double linf = tail.lpNorm<Eigen::Infinity>();
  if (l1 <= 0.0) throw DegenerateTail("tau_split: zero tail");

  info.a = l1 * l1 / l2sq;
  info.b = l1 / linf;
  info.tau = (info.b / info.a) * std::pow(info.a / static_cast<double>(n), 0.75);
  info.tail_l1 = l1;

  std::vector<Index> sel;
  for (Index i = 0; i < k; ++i) sel.push_back(i);
  double removed = 0.0;
  for (Index i = k; i < d; ++i) {
    if (eigs[i] >= info.tau * linf) {
      info.s_tau.push_back(i);
      sel.push_back(i);
      removed += eigs[i];
    }
  }
  info.kept_l1 = l1 - removed;
  info.split = CovSplit::of(cov, std::move(sel));
  return info;
}

CovSplit tau_split(const CovarianceModel& cov, Index k, Index n) {
  return tau_split_info(cov, k, n).split;
}

}  // namespace interplab
