#pragma once

#include <cstdint>
#include <vector>

#include "interplab/common.hpp"
#include "interplab/model.hpp"

namespace interplab {

struct WidthEstimate {
  enum class Method { closed_form, monte_carlo };
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
  Method method = Method::monte_carlo;
};

// Monte Carlo statistics of ||v*||_Sigma for v* the minimal-seminorm
// subgradient of the dual norm of Sigma^{1/2} H.
struct VStarStats {
  double mean = 0.0;
  double std_error = 0.0;
  double quantile = 0.0;  // at the level passed in
  long samples = 0;
};

struct RankReport {
  Norm norm = Norm::L2;
  double r = 0.0;       // Tr / op
  double R = 0.0;       // Tr^2 / Tr(Sigma^2)
  double r_norm = 0.0;  // (E||Sigma^{1/2}H||_* / sup_{||w||<=1} ||w||_Sigma)^2
  double R_norm = 0.0;  // (E||Sigma^{1/2}H||_* / E||v*||_Sigma)^2
  double r_norm_err = 0.0;  // one-sigma, delta method
  double R_norm_err = 0.0;
  double r1 = 0.0;      // recorded for the l1 norm (equals r_norm there)
  WidthEstimate width;  // E||Sigma^{1/2}H||_* (B = 1)
  VStarStats vstar;
};

// sup over the norm ball of radius B of ||w||_Sigma, i.e. rad(Sigma^{1/2} K).
// Exact for l2 (sqrt of top eigenvalue) and l1 (sqrt of max diagonal entry).
// For linf the exact sign-vector enumeration runs up to d <= 20; above that a
// sum-of-absolute-entries upper bound is returned (exact when Sigma is
// diagonal, conservative otherwise).
double radius(const CovView& cov, Norm norm, double B);
double radius(const CovarianceModel& cov, Norm norm, double B);

WidthEstimate gaussian_width_mc(const CovView& cov, Norm norm, double B, long samples,
                                std::uint64_t seed);
WidthEstimate gaussian_width_mc(const CovarianceModel& cov, Norm norm, double B, long samples,
                                std::uint64_t seed);

// Minimal-||.||_Sigma subgradient of the dual norm at u. For l1 the rule is:
// among the argmax coordinates of |u| (relative tie window 1e-12) take
// sign(u_i) e_i with the smallest Sigma_ii, lowest index on an exact tie.
VectorXd subgradient_dual(Norm norm, const Eigen::Ref<const VectorXd>& u, const CovView& cov);
VectorXd subgradient_dual(Norm norm, const Eigen::Ref<const VectorXd>& u,
                          const CovarianceModel& cov);

std::pair<double, double> effective_ranks_l2(const CovView& cov);
std::pair<double, double> effective_ranks_l2(const CovarianceModel& cov);

VStarStats vstar_stats(const CovView& cov, Norm norm, long samples, std::uint64_t seed,
                       double quantile_level);

RankReport effective_ranks_general(const CovView& cov, Norm norm, long samples,
                                   std::uint64_t seed);
RankReport effective_ranks_general(const CovarianceModel& cov, Norm norm, long samples,
                                   std::uint64_t seed);

// Width estimates for every top-k tail at once: entry k is
// E||Sigma_2(k)^{1/2} H||_* where Sigma_2(k) keeps eigenvalues k..d-1.
// Shares the Gaussian draws across k (suffix reductions), so entries are
// positively correlated but individually unbiased. k ranges over 0..k_max.
std::vector<WidthEstimate> width_table_top_k(const CovarianceModel& cov, Norm norm, Index k_max,
                                             long samples, std::uint64_t seed);

}  // namespace interplab
