#pragma once

#include <cstdint>

#include "interplab/common.hpp"
#include "interplab/model.hpp"

namespace interplab {

struct SolverStats {
  long iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
};

struct InterpolatorResult {
  VectorXd w;
  Norm norm_used = Norm::L2;
  double norm_value = 0.0;
  double train_loss = 0.0;
  double pop_loss = std::numeric_limits<double>::quiet_NaN();  // filled when a spec is supplied
  SolverStats stats;
};

struct WorstCaseResult {
  enum class Certificate { exact, lower_bound_witness };
  VectorXd w;
  double value = 0.0;        // population loss at w
  double ball_radius = 0.0;  // B
  Certificate certificate = Certificate::exact;
  double kkt_residual = 0.0;
};

struct AdmmOptions {
  double rho = 1.0;
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;
  long max_iter = 50000;
};

// Minimum Euclidean norm solution of Xw = Y via SVD pseudoinverse with
// rcond = max(n,d) * machine epsilon. Throws NoInterpolator when the design
// is rank-deficient and cannot match Y, IllConditioned when full-rank
// arithmetic still misses the interpolation certificate.
InterpolatorResult min_l2_interpolator(const Dataset& ds);
InterpolatorResult min_l2_interpolator(const ProblemSpec& spec, const Dataset& ds);

// Basis pursuit: min ||w||_1 s.t. Xw = Y, by ADMM with exact affine
// projection (cached SVD factors) and residual balancing. The returned point
// is affine-projected, so it interpolates to machine precision; optimality is
// certified by the LP duality gap in stats.
InterpolatorResult min_l1_interpolator(const Dataset& ds, double tol = 1e-9,
                                       const AdmmOptions& opts = {});
InterpolatorResult min_l1_interpolator(const ProblemSpec& spec, const Dataset& ds,
                                       double tol = 1e-9, const AdmmOptions& opts = {});

// Same splitting with the linf objective (prox via l1-ball projection).
InterpolatorResult min_linf_interpolator(const Dataset& ds, double tol = 1e-9,
                                         const AdmmOptions& opts = {});
InterpolatorResult min_linf_interpolator(const ProblemSpec& spec, const Dataset& ds,
                                         double tol = 1e-9, const AdmmOptions& opts = {});

// Exact maximization of L(w) over {Xw = Y, ||w||_2 <= B}: nullspace
// parametrization reduces to maximizing a PSD quadratic over a sphere,
// solved by eigendecomposition plus secular-equation bisection (hard case by
// eigenvector completion).
WorstCaseResult worst_case_l2_interpolator(const ProblemSpec& spec, const Dataset& ds, double B);

// Multi-start projected gradient ascent over {Xw = Y} n {||w||_1 <= B}.
// Returns the best feasible witness; global optimality is not claimed.
WorstCaseResult worst_case_l1_witness(const ProblemSpec& spec, const Dataset& ds, double B,
                                      int restarts);

// Euclidean projection onto {||w||_1 <= radius} (sort-based).
VectorXd project_l1_ball(const Eigen::Ref<const VectorXd>& v, double radius);

}  // namespace interplab
