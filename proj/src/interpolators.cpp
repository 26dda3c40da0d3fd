#include "interplab/interpolators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "interplab/rng.hpp"

namespace interplab {

namespace {

constexpr double kInterpCertFactor = 1e-8;

struct DesignFactors {
  MatrixXd u;        // n x rank
  MatrixXd v;        // d x rank (row-space basis)
  VectorXd s;        // rank singular values
  MatrixXd v_null;   // d x (d - rank), only when full_v requested
  Index rank = 0;
  double smax = 0.0;
  Index n = 0, d = 0;

  VectorXd pinv_apply(const VectorXd& y) const {
    return v * (u.transpose() * y).cwiseQuotient(s);
  }
  // v - P_rowspace(v) + w_feas: the Euclidean projection onto {Xw = Y}.
  VectorXd affine_project(const VectorXd& w_feas, const VectorXd& x) const {
    return x - v * (v.transpose() * x) + w_feas;
  }
};

DesignFactors factor_design(const MatrixXd& x, bool need_nullspace) {
  DesignFactors f;
  f.n = x.rows();
  f.d = x.cols();
  const unsigned opts = need_nullspace ? (Eigen::ComputeThinU | Eigen::ComputeFullV)
                                       : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<MatrixXd> svd(x, opts);
  const VectorXd& sv = svd.singularValues();
  f.smax = sv.size() ? sv[0] : 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  const double thresh = static_cast<double>(std::max(f.n, f.d)) * eps * f.smax;
  Index r = 0;
  while (r < sv.size() && sv[r] > thresh) ++r;
  f.rank = r;
  f.u = svd.matrixU().leftCols(r);
  f.v = svd.matrixV().leftCols(r);
  f.s = sv.head(r);
  if (need_nullspace) f.v_null = svd.matrixV().rightCols(f.d - r);
  return f;
}

double interp_cert_threshold(const VectorXd& y) {
  return kInterpCertFactor * (1.0 + y.cwiseAbs().maxCoeff());
}

void check_interpolation(const DesignFactors& f, const MatrixXd& x, const VectorXd& y,
                         const VectorXd& w) {
  const double resid = (x * w - y).cwiseAbs().maxCoeff();
  if (resid > interp_cert_threshold(y)) {
    if (f.rank < f.n) throw NoInterpolator("design cannot interpolate the labels (rank deficient)");
    throw IllConditioned("interpolation residual above certificate threshold");
  }
}

InterpolatorResult finish_result(const Dataset& ds, VectorXd w, Norm norm, SolverStats stats) {
  InterpolatorResult res;
  res.norm_used = norm;
  res.norm_value = norm_value(norm, w);
  res.train_loss = (ds.x * w - ds.y).squaredNorm() / static_cast<double>(ds.n());
  res.w = std::move(w);
  res.stats = stats;
  return res;
}

VectorXd soft_threshold(const VectorXd& v, double kappa) {
  return v.unaryExpr([kappa](double x) {
    const double m = std::abs(x) - kappa;
    return m > 0.0 ? (x > 0.0 ? m : -m) : 0.0;
  });
}

// Shared ADMM loop for min ||w||_p s.t. Xw = Y with p in {1, inf}.
// prox(v, t) must return prox_{t || . ||_p}(v); dual feasibility scales the
// row-space multiplier by the dual norm of X' nu.
InterpolatorResult admm_min_norm(const Dataset& ds, Norm norm, double tol,
                                 const AdmmOptions& opts) {
  const Index n = ds.n(), d = ds.dim();
  if (n > d) throw NoInterpolator("n > d: no interpolators in general position");
  const DesignFactors f = factor_design(ds.x, false);
  VectorXd w_feas;
  if (ds.y.cwiseAbs().maxCoeff() == 0.0) {
    w_feas = VectorXd::Zero(d);
  } else {
    w_feas = f.pinv_apply(ds.y);
    check_interpolation(f, ds.x, ds.y, w_feas);
  }

  const Norm dual = dual_norm(norm);
  auto prox = [&](const VectorXd& v, double t) -> VectorXd {
    if (norm == Norm::L1) return soft_threshold(v, t);
    return v - t * project_l1_ball(v / t, 1.0);
  };

  double rho = opts.rho;
  VectorXd z = w_feas;
  VectorXd u = VectorXd::Zero(d);
  VectorXd w = w_feas;
  SolverStats stats;
  double gap = std::numeric_limits<double>::infinity();
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  bool converged = false;

  auto duality_gap = [&](const VectorXd& w_point) -> double {
    // Candidate multiplier from the scaled dual variable: rho*u lies in the
    // row space at convergence; map to nu with X' nu ~ rho*u, then rescale
    // into the dual-feasible set {|| X' nu ||_dual* <= 1}.
    const VectorXd t = f.v.transpose() * (rho * u);
    const VectorXd nu = f.u * t.cwiseQuotient(f.s);
    const VectorXd xtnu = f.v * (f.s.cwiseProduct(f.u.transpose() * nu));
    const double scale = std::max(1.0, norm_value(dual, xtnu));
    const double dual_value = ds.y.dot(nu) / scale;
    return norm_value(norm, w_point) - dual_value;
  };

  for (long it = 1; it <= opts.max_iter; ++it) {
    w = f.affine_project(w_feas, z - u);
    const VectorXd z_prev = z;
    z = prox(w + u, 1.0 / rho);
    u += w - z;

    const double r_norm = (w - z).norm();
    const double s_norm = rho * (z - z_prev).norm();
    stats.iterations = it;
    stats.primal_residual = r_norm;
    stats.dual_residual = s_norm;

    const double eps_pri = sqrt_d * opts.tol_abs + opts.tol_rel * std::max(w.norm(), z.norm());
    const double eps_dual = sqrt_d * opts.tol_abs + opts.tol_rel * rho * u.norm();
    if (r_norm < eps_pri && s_norm < eps_dual) {
      gap = duality_gap(f.affine_project(w_feas, z));
      if (gap <= tol * std::max(1.0, norm_value(norm, z)) || gap <= 1e-12) {
        converged = true;
        break;
      }
    }
    // Residual balancing, frozen after the equilibration phase: with a
    // fixed rho the iteration is averaged and must converge, while endless
    // rescaling can settle into an exact limit cycle.
    if (it % 10 == 0 && it <= 1000) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        u *= 0.5;
      } else if (s_norm > 10.0 * r_norm) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }
  if (!converged) throw NotConverged("ADMM hit max iterations before certificates");

  VectorXd w_out = f.affine_project(w_feas, z);
  check_interpolation(f, ds.x, ds.y, w_out);
  stats.duality_gap = duality_gap(w_out);
  return finish_result(ds, std::move(w_out), norm, stats);
}

}  // namespace

InterpolatorResult min_l2_interpolator(const Dataset& ds) {
  const Index n = ds.n(), d = ds.dim();
  if (n > d) throw NoInterpolator("n > d: no interpolators in general position");
  const DesignFactors f = factor_design(ds.x, false);
  VectorXd w;
  if (ds.y.cwiseAbs().maxCoeff() == 0.0) {
    w = VectorXd::Zero(d);
  } else {
    w = f.pinv_apply(ds.y);
    check_interpolation(f, ds.x, ds.y, w);
  }
  SolverStats stats;
  stats.iterations = 1;
  stats.primal_residual = (ds.x * w - ds.y).cwiseAbs().maxCoeff();
  return finish_result(ds, std::move(w), Norm::L2, stats);
}

InterpolatorResult min_l2_interpolator(const ProblemSpec& spec, const Dataset& ds) {
  InterpolatorResult res = min_l2_interpolator(ds);
  res.pop_loss = population_loss(spec, res.w);
  return res;
}

InterpolatorResult min_l1_interpolator(const Dataset& ds, double tol, const AdmmOptions& opts) {
  return admm_min_norm(ds, Norm::L1, tol, opts);
}

InterpolatorResult min_l1_interpolator(const ProblemSpec& spec, const Dataset& ds, double tol,
                                       const AdmmOptions& opts) {
  InterpolatorResult res = min_l1_interpolator(ds, tol, opts);
  res.pop_loss = population_loss(spec, res.w);
  return res;
}

InterpolatorResult min_linf_interpolator(const Dataset& ds, double tol, const AdmmOptions& opts) {
  return admm_min_norm(ds, Norm::Linf, tol, opts);
}

InterpolatorResult min_linf_interpolator(const ProblemSpec& spec, const Dataset& ds, double tol,
                                         const AdmmOptions& opts) {
  InterpolatorResult res = min_linf_interpolator(ds, tol, opts);
  res.pop_loss = population_loss(spec, res.w);
  return res;
}

VectorXd project_l1_ball(const Eigen::Ref<const VectorXd>& v, double radius) {
  if (radius < 0.0) throw LabError("l1 ball radius must be non-negative");
  const Index d = v.size();
  if (v.cwiseAbs().sum() <= radius) return v;
  if (radius == 0.0) return VectorXd::Zero(d);
  std::vector<double> mu(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) mu[i] = std::abs(v[i]);
  std::sort(mu.begin(), mu.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    cum += mu[j];
    const double cand = (cum - radius) / static_cast<double>(j + 1);
    if (mu[j] - cand > 0.0) theta = cand;
    else break;
  }
  return v.unaryExpr([theta](double x) {
    const double m = std::abs(x) - theta;
    return m > 0.0 ? (x > 0.0 ? m : -m) : 0.0;
  });
}

WorstCaseResult worst_case_l2_interpolator(const ProblemSpec& spec, const Dataset& ds, double B) {
  const Index d = ds.dim();
  const DesignFactors f = factor_design(ds.x, true);
  VectorXd w_hat;
  if (ds.y.cwiseAbs().maxCoeff() == 0.0) {
    w_hat = VectorXd::Zero(d);
  } else {
    w_hat = f.pinv_apply(ds.y);
    check_interpolation(f, ds.x, ds.y, w_hat);
  }
  const double min_norm = w_hat.norm();
  if (B < min_norm * (1.0 - 1e-12)) throw Infeasible("ball radius below the minimum norm");

  WorstCaseResult res;
  res.ball_radius = B;
  res.certificate = WorstCaseResult::Certificate::exact;

  const double rho_sq = std::max(0.0, B * B - min_norm * min_norm);
  const double rho = std::sqrt(rho_sq);
  const Index m = f.d - f.rank;
  const VectorXd delta = w_hat - spec.w_star;
  if (m == 0 || rho <= 1e-14 * std::max(1.0, B)) {
    res.w = w_hat;
    res.value = population_loss(spec, w_hat);
    res.kkt_residual = 0.0;
    return res;
  }

  // Objective in nullspace coordinates z: c + 2 g'z + z'Az over ||z|| <= rho,
  // with A = N' Sigma N PSD, so the maximum sits on the sphere.
  MatrixXd sigma_n(d, m);
  for (Index j = 0; j < m; ++j) sigma_n.col(j) = spec.cov.apply(f.v_null.col(j));
  const MatrixXd a_mat = f.v_null.transpose() * sigma_n;
  const VectorXd g = sigma_n.transpose() * delta;

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a_mat);
  if (es.info() != Eigen::Success) throw IllConditioned("nullspace eigendecomposition failed");
  const VectorXd lam = es.eigenvalues();  // ascending
  const MatrixXd q = es.eigenvectors();
  const double lam_max = lam[m - 1];
  const VectorXd b = q.transpose() * g;

  const double tol_eig = 1e-10 * std::max(1.0, std::abs(lam_max));
  double top_mass = 0.0, tilde_sq = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (lam_max - lam[i] <= tol_eig) top_mass += b[i] * b[i];
    else tilde_sq += b[i] * b[i] / ((lam_max - lam[i]) * (lam_max - lam[i]));
  }

  VectorXd z;
  double mu = lam_max;
  const double g_scale = std::max(1.0, g.norm());
  if (top_mass <= 1e-20 * g_scale * g_scale && tilde_sq <= rho_sq) {
    // Hard case: complete with the top eigenvector.
    VectorXd zc = VectorXd::Zero(m);
    for (Index i = 0; i < m; ++i) {
      if (lam_max - lam[i] > tol_eig) zc[i] = b[i] / (lam_max - lam[i]);
    }
    const double alpha = std::sqrt(std::max(0.0, rho_sq - tilde_sq));
    zc[m - 1] += alpha;  // ascending order: last entry is a top eigenvector coordinate
    z = q * zc;
  } else {
    auto h = [&](double mu_val) {
      double acc = 0.0;
      for (Index i = 0; i < m; ++i) {
        const double dmu = mu_val - lam[i];
        acc += b[i] * b[i] / (dmu * dmu);
      }
      return acc;
    };
    double lo = lam_max + 1e-14 * std::max(1.0, std::abs(lam_max));
    while (h(lo) < rho_sq && lo - lam_max > 1e-300) {
      lo = lam_max + (lo - lam_max) * 0.5;
    }
    double hi = lam_max + b.norm() / rho + 1.0;
    while (h(hi) > rho_sq) hi = lam_max + 2.0 * (hi - lam_max);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) > rho_sq ? lo : hi) = mid;
    }
    mu = 0.5 * (lo + hi);
    VectorXd zc(m);
    for (Index i = 0; i < m; ++i) zc[i] = b[i] / (mu - lam[i]);
    zc *= rho / zc.norm();  // land exactly on the sphere
    z = q * zc;
  }

  res.w = w_hat + f.v_null * z;
  res.value = population_loss(spec, res.w);
  const VectorXd kkt = mu * z - a_mat * z - g;
  res.kkt_residual = kkt.norm() / g_scale + std::abs(z.norm() - rho);
  return res;
}

namespace {

// Alternating projection onto {Xw=Y} n {||w||_1 <= B}, finishing on the
// affine set, then an exact l1 polish along the segment toward a feasible
// anchor (both endpoints interpolate, the l1 norm is convex on the segment).
VectorXd project_intersection(const DesignFactors& f, const VectorXd& w_feas,
                              const VectorXd& anchor, double B, const VectorXd& x0) {
  VectorXd w = x0;
  for (int it = 0; it < 80; ++it) {
    w = project_l1_ball(w, B);
    w = f.affine_project(w_feas, w);
    if (w.cwiseAbs().sum() <= B * (1.0 + 1e-12)) break;
  }
  if (w.cwiseAbs().sum() > B * (1.0 + 1e-10)) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const VectorXd cand = anchor + mid * (w - anchor);
      (cand.cwiseAbs().sum() <= B ? lo : hi) = mid;
    }
    w = anchor + lo * (w - anchor);
  }
  return w;
}

}  // namespace

WorstCaseResult worst_case_l1_witness(const ProblemSpec& spec, const Dataset& ds, double B,
                                      int restarts) {
  const Index d = ds.dim();
  const InterpolatorResult bp = min_l1_interpolator(spec, ds);
  if (bp.norm_value > B * (1.0 + 1e-10)) throw Infeasible("l1 ball below the basis pursuit norm");
  const DesignFactors f = factor_design(ds.x, false);
  const VectorXd w_feas = ds.y.cwiseAbs().maxCoeff() == 0.0 ? VectorXd::Zero(d).eval()
                                                            : f.pinv_apply(ds.y).eval();
  const VectorXd& anchor = bp.w;

  VectorXd best = anchor;
  double best_val = population_loss(spec, best);

  const double lam_max = spec.cov.op_norm();
  const double base_step = lam_max > 0.0 ? 1.0 / (2.0 * lam_max) : 1.0;
  Rng dir_rng(Rng::derive(ds.seed, {0x17}));

  for (int r = 0; r < std::max(1, restarts); ++r) {
    VectorXd w = anchor;
    if (r > 0) {
      const VectorXd dir = dir_rng.gauss_vector(d);
      w = project_intersection(f, w_feas, anchor, B, anchor + (B / std::sqrt(double(d))) * dir);
    }
    double step = base_step;
    double val = population_loss(spec, w);
    int stall = 0;
    for (int it = 0; it < 400 && stall < 12; ++it) {
      const VectorXd grad = 2.0 * spec.cov.apply(w - spec.w_star);
      const VectorXd trial = project_intersection(f, w_feas, anchor, B, w + step * grad);
      const double tval = population_loss(spec, trial);
      if (tval > val * (1.0 + 1e-14) + 1e-16) {
        w = trial;
        val = tval;
        step *= 1.3;
        stall = 0;
      } else {
        step *= 0.5;
        ++stall;
      }
    }
    if (val > best_val) {
      best_val = val;
      best = w;
    }
  }

  WorstCaseResult res;
  res.w = best;
  res.value = best_val;
  res.ball_radius = B;
  res.certificate = WorstCaseResult::Certificate::lower_bound_witness;
  const double probe = 1e-6;
  const VectorXd grad = 2.0 * spec.cov.apply(best - spec.w_star);
  const VectorXd moved = project_intersection(f, w_feas, anchor, B, best + probe * grad);
  res.kkt_residual = (moved - best).norm() / probe;
  return res;
}

}  // namespace interplab
