#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "interplab/common.hpp"

namespace interplab {

// Covariance given by its spectrum plus an optional orthonormal basis.
// Absent basis means Sigma = diag(eigenvalues). Eigenvalues are kept sorted
// non-increasing; tiny negatives (above -1e-14 * lambda_max) are clamped to
// zero, anything more negative is rejected.
class CovarianceModel {
 public:
  static constexpr Index kDefaultMaxDiagonalDim = 65536;
  static constexpr Index kDefaultMaxDenseDim = 4096;

  // Desk-scale guardrails; adjustable for larger formula-only studies.
  static Index max_diagonal_dim();
  static Index max_dense_dim();
  static void set_dimension_caps(Index diagonal_cap, Index dense_cap);

  static CovarianceModel diagonal(VectorXd eigenvalues);
  static CovarianceModel with_basis(VectorXd eigenvalues, MatrixXd basis);
  static CovarianceModel identity(Index d);

  Index dim() const { return eigs_.size(); }
  const VectorXd& eigenvalues() const { return eigs_; }
  bool is_diagonal() const { return !basis_.has_value(); }
  const MatrixXd& basis() const { return *basis_; }

  double trace() const { return eigs_.sum(); }
  double op_norm() const { return eigs_.size() ? eigs_[0] : 0.0; }
  double trace_sq() const { return eigs_.squaredNorm(); }
  bool is_zero() const { return eigs_.size() == 0 || eigs_[0] <= 0.0; }

  MatrixXd matrix() const;
  VectorXd diag_entries() const;

  // Sigma^{1/2} v and Sigma v.
  VectorXd apply_sqrt(const Eigen::Ref<const VectorXd>& v) const;
  VectorXd apply(const Eigen::Ref<const VectorXd>& v) const;
  // v' Sigma v (the squared Mahalanobis seminorm).
  double quad_form(const Eigen::Ref<const VectorXd>& v) const;

 private:
  CovarianceModel(VectorXd eigs, std::optional<MatrixXd> basis);
  VectorXd eigs_;
  VectorXd sqrt_eigs_;
  std::optional<MatrixXd> basis_;
};

// Generative model (X, Y): rows of X are N(0, Sigma), Y = X w* + xi with
// xi ~ N(0, sigma^2 I_n).
struct ProblemSpec {
  CovarianceModel cov;
  VectorXd w_star;
  double sigma = 0.0;
  Index n = 1;

  ProblemSpec(CovarianceModel c, VectorXd w, double sig, Index n_samples);
  Index dim() const { return cov.dim(); }
};

struct Dataset {
  MatrixXd x;   // n x d
  VectorXd xi;  // n
  VectorXd y;   // n
  std::uint64_t seed = 0;

  Index n() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

// Eigenbasis-aligned covariance split: sel1 are the spectrum indices assigned
// to Sigma_1, the complement forms Sigma_2. Disjoint eigenvector sets make
// Sigma_1 Sigma_2 = 0 structurally.
struct CovSplit {
  std::vector<Index> sel1;

  static CovSplit of(const CovarianceModel& cov, std::vector<Index> sel1);
  Index rank1() const { return static_cast<Index>(sel1.size()); }
  // Masked eigenvalue vectors aligned with the parent spectrum order.
  VectorXd eigs1(const CovarianceModel& cov) const;
  VectorXd eigs2(const CovarianceModel& cov) const;
};

// A (possibly masked) part of a covariance: the parent model plus an aligned
// eigenvalue vector. All width/radius/rank computations work on views so
// split parts never need re-sorting or dense projector materialization.
struct CovView {
  const CovarianceModel* parent = nullptr;
  VectorXd eigs;

  Index dim() const { return eigs.size(); }
  double trace() const { return eigs.sum(); }
  double op_norm() const { return eigs.size() ? eigs.maxCoeff() : 0.0; }
  double trace_sq() const { return eigs.squaredNorm(); }
  bool is_zero() const { return dim() == 0 || op_norm() <= 0.0; }
  Index rank() const { return (eigs.array() > 0.0).count(); }
  bool diagonal_basis() const { return parent->is_diagonal(); }

  VectorXd diag_entries() const;
  VectorXd apply_sqrt(const Eigen::Ref<const VectorXd>& v) const;
  VectorXd apply(const Eigen::Ref<const VectorXd>& v) const;
  double quad_form(const Eigen::Ref<const VectorXd>& v) const;
  double mahalanobis(const Eigen::Ref<const VectorXd>& v) const;
  // Projection onto span of this part (in the eigenbasis, the coordinates
  // with positive eigenvalue).
  VectorXd project_span(const Eigen::Ref<const VectorXd>& v) const;
};

CovView full_view(const CovarianceModel& cov);
CovView part1_view(const CovarianceModel& cov, const CovSplit& split);
CovView part2_view(const CovarianceModel& cov, const CovSplit& split);

Dataset sample_dataset(const ProblemSpec& spec, std::uint64_t seed);

double population_loss(const ProblemSpec& spec, const Eigen::Ref<const VectorXd>& w);
double empirical_loss(const Dataset& ds, const Eigen::Ref<const VectorXd>& w);

}  // namespace interplab
