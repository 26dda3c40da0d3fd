#include "interplab/complexity.hpp"

#include <algorithm>
#include <cmath>

#include "interplab/rng.hpp"

namespace interplab {

namespace {

constexpr long kMcChunk = 4096;
constexpr Index kLinfEnumCap = 20;

// Mean / std-error accumulator with a fixed chunked reduction order.
struct MeanVar {
  double sum = 0.0, sumsq = 0.0;
  long count = 0;
  void add(double x) {
    sum += x;
    sumsq += x * x;
    ++count;
  }
  double mean() const { return count ? sum / count : 0.0; }
  double std_error() const {
    if (count < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sumsq - count * m * m) / (count - 1));
    return std::sqrt(var / count);
  }
};

double dual_norm_value(Norm primal, const VectorXd& v) {
  return norm_value(dual_norm(primal), v);
}

double max_quad_over_signs(const MatrixXd& sigma) {
  // max over s in {+-1}^d of s' Sigma s; fix s[0] = +1 by symmetry.
  const Index d = sigma.rows();
  double best = 0.0;
  VectorXd s = VectorXd::Ones(d);
  const std::uint64_t combos = 1ULL << (d - 1);
  for (std::uint64_t m = 0; m < combos; ++m) {
    for (Index i = 1; i < d; ++i) s[i] = (m >> (i - 1)) & 1 ? -1.0 : 1.0;
    best = std::max(best, s.dot(sigma * s));
  }
  return best;
}

}  // namespace

double radius(const CovView& cov, Norm norm, double B) {
  if (B < 0.0) throw LabError("radius requires B >= 0");
  switch (norm) {
    case Norm::L2:
      return B * std::sqrt(std::max(0.0, cov.op_norm()));
    case Norm::L1:
      return B * std::sqrt(std::max(0.0, cov.diag_entries().maxCoeff()));
    case Norm::Linf: {
      if (cov.diagonal_basis()) {
        // s' Sigma s = Tr(Sigma) for every sign vector when Sigma is diagonal.
        return B * std::sqrt(cov.trace());
      }
      const MatrixXd sigma =
          cov.parent->basis() * cov.eigs.asDiagonal() * cov.parent->basis().transpose();
      if (cov.dim() <= kLinfEnumCap) {
        return B * std::sqrt(max_quad_over_signs(sigma));
      }
      // Above the enumeration cap: sum_ij |Sigma_ij| upper bound.
      return B * std::sqrt(sigma.cwiseAbs().sum());
    }
  }
  throw UnsupportedNorm("radius: unsupported norm tag");
}

double radius(const CovarianceModel& cov, Norm norm, double B) {
  const CovView v = full_view(cov);
  return radius(v, norm, B);
}

WidthEstimate gaussian_width_mc(const CovView& cov, Norm norm, double B, long samples,
                                std::uint64_t seed) {
  if (samples < 100) throw LabError("gaussian_width_mc requires samples >= 100");
  if (norm != Norm::L1 && norm != Norm::L2 && norm != Norm::Linf)
    throw UnsupportedNorm("gaussian_width_mc: unsupported norm tag");
  WidthEstimate est;
  est.samples = samples;
  if (cov.is_zero() || B == 0.0) {
    est.method = WidthEstimate::Method::closed_form;
    return est;
  }
  MeanVar acc;
  const Index d = cov.dim();
  for (long start = 0; start < samples; start += kMcChunk) {
    const long chunk_len = std::min<long>(kMcChunk, samples - start);
    Rng rng(Rng::derive(seed, {0x77, static_cast<std::uint64_t>(start / kMcChunk)}));
    for (long i = 0; i < chunk_len; ++i) {
      const VectorXd h = rng.gauss_vector(d);
      acc.add(dual_norm_value(norm, cov.apply_sqrt(h)));
    }
  }
  est.mean = B * acc.mean();
  est.std_error = B * acc.std_error();
  return est;
}

WidthEstimate gaussian_width_mc(const CovarianceModel& cov, Norm norm, double B, long samples,
                                std::uint64_t seed) {
  const CovView v = full_view(cov);
  return gaussian_width_mc(v, norm, B, samples, seed);
}

VectorXd subgradient_dual(Norm norm, const Eigen::Ref<const VectorXd>& u, const CovView& cov) {
  const Index d = u.size();
  if (d != cov.dim()) throw DimensionMismatch("subgradient_dual dimension mismatch");
  const double umax = u.cwiseAbs().maxCoeff();
  if (umax == 0.0) throw ZeroVector("subgradient_dual requires u != 0");
  switch (norm) {
    case Norm::L2:
      return u / u.norm();
    case Norm::L1: {
      // Dual norm is linf; subgradients are sign(u_i) e_i over argmax coords.
      const VectorXd diag = cov.diag_entries();
      Index best = -1;
      double best_diag = 0.0;
      for (Index i = 0; i < d; ++i) {
        if (std::abs(u[i]) >= umax * (1.0 - 1e-12)) {
          if (best < 0 || diag[i] < best_diag) {
            best = i;
            best_diag = diag[i];
          }
        }
      }
      VectorXd v = VectorXd::Zero(d);
      v[best] = u[best] >= 0.0 ? 1.0 : -1.0;
      return v;
    }
    case Norm::Linf: {
      // Dual norm is l1; sign pattern on the support, zero elsewhere (the
      // seminorm-minimal choice when Sigma is diagonal).
      VectorXd v = VectorXd::Zero(d);
      for (Index i = 0; i < d; ++i) {
        if (u[i] > 0.0) v[i] = 1.0;
        else if (u[i] < 0.0) v[i] = -1.0;
      }
      return v;
    }
  }
  throw UnsupportedNorm("subgradient_dual: unsupported norm tag");
}

VectorXd subgradient_dual(Norm norm, const Eigen::Ref<const VectorXd>& u,
                          const CovarianceModel& cov) {
  const CovView v = full_view(cov);
  return subgradient_dual(norm, u, v);
}

std::pair<double, double> effective_ranks_l2(const CovView& cov) {
  if (cov.is_zero()) throw ZeroCovariance("effective ranks of a zero covariance");
  return {cov.trace() / cov.op_norm(), cov.trace() * cov.trace() / cov.trace_sq()};
}

std::pair<double, double> effective_ranks_l2(const CovarianceModel& cov) {
  const CovView v = full_view(cov);
  return effective_ranks_l2(v);
}

VStarStats vstar_stats(const CovView& cov, Norm norm, long samples, std::uint64_t seed,
                       double quantile_level) {
  if (samples < 100) throw LabError("vstar_stats requires samples >= 100");
  if (cov.is_zero()) throw ZeroCovariance("vstar_stats of a zero covariance");
  const Index d = cov.dim();
  MeanVar acc;
  std::vector<double> values;
  values.reserve(samples);
  for (long start = 0; start < samples; start += kMcChunk) {
    const long chunk_len = std::min<long>(kMcChunk, samples - start);
    Rng rng(Rng::derive(seed, {0x7b, static_cast<std::uint64_t>(start / kMcChunk)}));
    for (long i = 0; i < chunk_len; ++i) {
      const VectorXd h = rng.gauss_vector(d);
      const VectorXd u = cov.apply_sqrt(h);
      const VectorXd v = subgradient_dual(norm, u, cov);
      const double val = cov.mahalanobis(v);
      acc.add(val);
      values.push_back(val);
    }
  }
  VStarStats out;
  out.samples = samples;
  out.mean = acc.mean();
  out.std_error = acc.std_error();
  std::sort(values.begin(), values.end());
  const double lv = std::clamp(quantile_level, 0.0, 1.0);
  const auto idx = static_cast<std::size_t>(lv * (values.size() - 1));
  out.quantile = values[idx];
  return out;
}

RankReport effective_ranks_general(const CovView& cov, Norm norm, long samples,
                                   std::uint64_t seed) {
  if (cov.is_zero()) throw ZeroCovariance("effective ranks of a zero covariance");
  RankReport rep;
  rep.norm = norm;
  std::tie(rep.r, rep.R) = effective_ranks_l2(cov);
  rep.width = gaussian_width_mc(cov, norm, 1.0, samples, Rng::derive(seed, {0xa}));
  const double rad = radius(cov, norm, 1.0);
  rep.r_norm = (rep.width.mean / rad) * (rep.width.mean / rad);
  rep.r_norm_err = 2.0 * rep.width.mean * rep.width.std_error / (rad * rad);
  rep.vstar = vstar_stats(cov, norm, samples, Rng::derive(seed, {0xb}), 0.99);
  const double w = rep.width.mean, v = rep.vstar.mean;
  rep.R_norm = (w / v) * (w / v);
  rep.R_norm_err = std::sqrt(std::pow(2.0 * w / (v * v) * rep.width.std_error, 2) +
                             std::pow(2.0 * w * w / (v * v * v) * rep.vstar.std_error, 2));
  if (norm == Norm::L1) {
    rep.r1 = rep.r_norm;
    const double slack = 3.0 * (rep.r_norm_err + rep.R_norm_err);
    if (rep.r1 > rep.R_norm + slack) {
      throw LabError("l1 effective rank exceeded R_l1 beyond MC error");
    }
  }
  return rep;
}

RankReport effective_ranks_general(const CovarianceModel& cov, Norm norm, long samples,
                                   std::uint64_t seed) {
  const CovView v = full_view(cov);
  return effective_ranks_general(v, norm, samples, seed);
}

std::vector<WidthEstimate> width_table_top_k(const CovarianceModel& cov, Norm norm, Index k_max,
                                             long samples, std::uint64_t seed) {
  if (samples < 100) throw LabError("width_table_top_k requires samples >= 100");
  const Index d = cov.dim();
  k_max = std::min(k_max, d);
  if (!cov.is_diagonal()) {
    // Dense basis: no suffix shortcut, evaluate each split separately.
    std::vector<WidthEstimate> table;
    table.reserve(k_max + 1);
    for (Index k = 0; k <= k_max; ++k) {
      VectorXd eigs = cov.eigenvalues();
      eigs.head(k).setZero();
      const CovView view{&cov, eigs};
      table.push_back(gaussian_width_mc(view, norm, 1.0, samples,
                                        Rng::derive(seed, {static_cast<std::uint64_t>(k)})));
    }
    return table;
  }

  const Norm dual = dual_norm(norm);
  const VectorXd sqrt_eigs = cov.eigenvalues().cwiseSqrt();
  std::vector<MeanVar> acc(k_max + 1);
  VectorXd work(d);
  std::vector<double> suffix(d + 1, 0.0);
  for (long start = 0; start < samples; start += kMcChunk) {
    const long chunk_len = std::min<long>(kMcChunk, samples - start);
    Rng rng(Rng::derive(seed, {0x77, static_cast<std::uint64_t>(start / kMcChunk)}));
    for (long s = 0; s < chunk_len; ++s) {
      for (Index i = 0; i < d; ++i) work[i] = sqrt_eigs[i] * rng.next_gauss();
      double tail = 0.0;
      if (dual == Norm::L2) {
        for (Index i = d - 1; i >= 0; --i) {
          tail += work[i] * work[i];
          suffix[i] = tail;
        }
        for (Index k = 0; k <= k_max; ++k) acc[k].add(std::sqrt(suffix[k]));
      } else if (dual == Norm::Linf) {
        for (Index i = d - 1; i >= 0; --i) {
          tail = std::max(tail, std::abs(work[i]));
          suffix[i] = tail;
        }
        for (Index k = 0; k <= k_max; ++k) acc[k].add(suffix[k]);
      } else {  // dual l1
        for (Index i = d - 1; i >= 0; --i) {
          tail += std::abs(work[i]);
          suffix[i] = tail;
        }
        for (Index k = 0; k <= k_max; ++k) acc[k].add(suffix[k]);
      }
    }
  }
  std::vector<WidthEstimate> table(k_max + 1);
  for (Index k = 0; k <= k_max; ++k) {
    table[k].mean = acc[k].mean();
    table[k].std_error = acc[k].std_error();
    table[k].samples = samples;
  }
  return table;
}

}  // namespace interplab
