#include "interplab/model.hpp"

#include <algorithm>
#include <cmath>

#include "interplab/rng.hpp"

namespace interplab {

namespace {

void validate_spectrum(VectorXd& eigs) {
  const Index d = eigs.size();
  if (d < 1) throw LabError("covariance dimension must be positive");
  const double lmax = d ? eigs.maxCoeff() : 0.0;
  const double clamp_floor = -1e-14 * std::max(lmax, 0.0);
  for (Index i = 0; i < d; ++i) {
    if (eigs[i] < clamp_floor) throw LabError("covariance eigenvalue is negative");
    if (eigs[i] < 0.0) eigs[i] = 0.0;
    if (i > 0 && eigs[i] > eigs[i - 1] + 1e-12 * std::max(1.0, lmax))
      throw LabError("covariance eigenvalues must be non-increasing");
    if (i > 0 && eigs[i] > eigs[i - 1]) eigs[i] = eigs[i - 1];
  }
}

void validate_basis(const MatrixXd& basis) {
  const Index d = basis.rows();
  if (basis.cols() != d) throw LabError("covariance basis must be square");
  if (d <= 1024) {
    const MatrixXd gram = basis.transpose() * basis;
    const double err = (gram - MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw LabError("covariance basis is not orthonormal");
  } else {
    // Probe check: B'(Bv) == v on a few deterministic directions.
    Rng rng(Rng::derive(0x5eedULL, {d == 0 ? 1ULL : static_cast<std::uint64_t>(d)}));
    for (int probe = 0; probe < 8; ++probe) {
      const VectorXd v = rng.gauss_vector(d);
      const double err = (basis.transpose() * (basis * v) - v).cwiseAbs().maxCoeff();
      if (err > 1e-8 * std::sqrt(static_cast<double>(d))) {
        throw LabError("covariance basis is not orthonormal");
      }
    }
  }
}

}  // namespace

namespace {
Index g_max_diagonal_dim = CovarianceModel::kDefaultMaxDiagonalDim;
Index g_max_dense_dim = CovarianceModel::kDefaultMaxDenseDim;
}  // namespace

Index CovarianceModel::max_diagonal_dim() { return g_max_diagonal_dim; }
Index CovarianceModel::max_dense_dim() { return g_max_dense_dim; }

void CovarianceModel::set_dimension_caps(Index diagonal_cap, Index dense_cap) {
  if (diagonal_cap < 1 || dense_cap < 1) throw LabError("dimension caps must be positive");
  g_max_diagonal_dim = diagonal_cap;
  g_max_dense_dim = dense_cap;
}

CovarianceModel::CovarianceModel(VectorXd eigs, std::optional<MatrixXd> basis)
    : eigs_(std::move(eigs)), basis_(std::move(basis)) {
  sqrt_eigs_ = eigs_.cwiseSqrt();
}

CovarianceModel CovarianceModel::diagonal(VectorXd eigenvalues) {
  if (eigenvalues.size() > max_diagonal_dim())
    throw LabError("diagonal covariance dimension cap exceeded");
  validate_spectrum(eigenvalues);
  return CovarianceModel(std::move(eigenvalues), std::nullopt);
}

CovarianceModel CovarianceModel::with_basis(VectorXd eigenvalues, MatrixXd basis) {
  if (eigenvalues.size() > max_dense_dim())
    throw LabError("dense covariance dimension cap exceeded");
  if (basis.rows() != eigenvalues.size()) throw DimensionMismatch("basis/spectrum size mismatch");
  validate_spectrum(eigenvalues);
  validate_basis(basis);
  return CovarianceModel(std::move(eigenvalues), std::move(basis));
}

CovarianceModel CovarianceModel::identity(Index d) {
  return diagonal(VectorXd::Ones(d));
}

MatrixXd CovarianceModel::matrix() const {
  if (is_diagonal()) return eigs_.asDiagonal();
  return basis() * eigs_.asDiagonal() * basis().transpose();
}

VectorXd CovarianceModel::diag_entries() const {
  if (is_diagonal()) return eigs_;
  return ((basis().array().square()).rowwise() * eigs_.transpose().array()).rowwise().sum();
}

VectorXd CovarianceModel::apply_sqrt(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("apply_sqrt dimension mismatch");
  if (is_diagonal()) return sqrt_eigs_.cwiseProduct(v);
  return basis() * sqrt_eigs_.cwiseProduct(basis().transpose() * v);
}

VectorXd CovarianceModel::apply(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("apply dimension mismatch");
  if (is_diagonal()) return eigs_.cwiseProduct(v);
  return basis() * eigs_.cwiseProduct(basis().transpose() * v);
}

double CovarianceModel::quad_form(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("quad_form dimension mismatch");
  if (is_diagonal()) return eigs_.dot(v.cwiseAbs2());
  return eigs_.dot((basis().transpose() * v).cwiseAbs2());
}

ProblemSpec::ProblemSpec(CovarianceModel c, VectorXd w, double sig, Index n_samples)
    : cov(std::move(c)), w_star(std::move(w)), sigma(sig), n(n_samples) {
  if (w_star.size() != cov.dim()) throw DimensionMismatch("w_star length must equal covariance dim");
  if (sigma < 0.0) throw LabError("sigma must be non-negative");
  if (n < 1) throw LabError("sample count must be positive");
}

CovSplit CovSplit::of(const CovarianceModel& cov, std::vector<Index> sel1) {
  std::sort(sel1.begin(), sel1.end());
  for (std::size_t i = 0; i < sel1.size(); ++i) {
    if (sel1[i] < 0 || sel1[i] >= cov.dim()) throw KOutOfRange("split index out of range");
    if (i > 0 && sel1[i] == sel1[i - 1]) throw KOutOfRange("duplicate split index");
  }
  return CovSplit{std::move(sel1)};
}

VectorXd CovSplit::eigs1(const CovarianceModel& cov) const {
  VectorXd e = VectorXd::Zero(cov.dim());
  for (Index i : sel1) e[i] = cov.eigenvalues()[i];
  return e;
}

VectorXd CovSplit::eigs2(const CovarianceModel& cov) const {
  VectorXd e = cov.eigenvalues();
  for (Index i : sel1) e[i] = 0.0;
  return e;
}

VectorXd CovView::diag_entries() const {
  if (parent->is_diagonal()) return eigs;
  return ((parent->basis().array().square()).rowwise() * eigs.transpose().array()).rowwise().sum();
}

VectorXd CovView::apply_sqrt(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("apply_sqrt dimension mismatch");
  if (parent->is_diagonal()) return eigs.cwiseSqrt().cwiseProduct(v);
  return parent->basis() * eigs.cwiseSqrt().cwiseProduct(parent->basis().transpose() * v);
}

VectorXd CovView::apply(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("apply dimension mismatch");
  if (parent->is_diagonal()) return eigs.cwiseProduct(v);
  return parent->basis() * eigs.cwiseProduct(parent->basis().transpose() * v);
}

double CovView::quad_form(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim()) throw DimensionMismatch("quad_form dimension mismatch");
  if (parent->is_diagonal()) return eigs.dot(v.cwiseAbs2());
  return eigs.dot((parent->basis().transpose() * v).cwiseAbs2());
}

double CovView::mahalanobis(const Eigen::Ref<const VectorXd>& v) const {
  return std::sqrt(std::max(0.0, quad_form(v)));
}

VectorXd CovView::project_span(const Eigen::Ref<const VectorXd>& v) const {
  VectorXd coords = parent->is_diagonal() ? VectorXd(v) : VectorXd(parent->basis().transpose() * v);
  for (Index i = 0; i < coords.size(); ++i) {
    if (eigs[i] <= 0.0) coords[i] = 0.0;
  }
  return parent->is_diagonal() ? coords : VectorXd(parent->basis() * coords);
}

CovView full_view(const CovarianceModel& cov) { return CovView{&cov, cov.eigenvalues()}; }

CovView part1_view(const CovarianceModel& cov, const CovSplit& split) {
  return CovView{&cov, split.eigs1(cov)};
}

CovView part2_view(const CovarianceModel& cov, const CovSplit& split) {
  return CovView{&cov, split.eigs2(cov)};
}

Dataset sample_dataset(const ProblemSpec& spec, std::uint64_t seed) {
  const Index n = spec.n;
  const Index d = spec.dim();
  Dataset ds;
  ds.seed = seed;

  Rng x_rng(Rng::derive(seed, {1}));
  MatrixXd g(n, d);
  x_rng.fill_gauss(g);
  if (spec.cov.is_diagonal()) {
    ds.x = g * spec.cov.eigenvalues().cwiseSqrt().asDiagonal();
  } else {
    ds.x = ((g * spec.cov.basis()) * spec.cov.eigenvalues().cwiseSqrt().asDiagonal()) *
           spec.cov.basis().transpose();
  }

  Rng xi_rng(Rng::derive(seed, {2}));
  ds.xi = spec.sigma * xi_rng.gauss_vector(n);
  ds.y = ds.x * spec.w_star + ds.xi;
  return ds;
}

double population_loss(const ProblemSpec& spec, const Eigen::Ref<const VectorXd>& w) {
  if (w.size() != spec.dim()) throw DimensionMismatch("population_loss dimension mismatch");
  return spec.sigma * spec.sigma + spec.cov.quad_form(w - spec.w_star);
}

double empirical_loss(const Dataset& ds, const Eigen::Ref<const VectorXd>& w) {
  if (w.size() != ds.dim()) throw DimensionMismatch("empirical_loss dimension mismatch");
  return (ds.y - ds.x * w).squaredNorm() / static_cast<double>(ds.n());
}

}  // namespace interplab
