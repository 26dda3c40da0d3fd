#include "interplab/cgmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "interplab/complexity.hpp"
#include "interplab/interpolators.hpp"
#include "interplab/rng.hpp"

namespace interplab {

namespace {

constexpr long kRhoGridPoints = 2000;

struct GapDraw {
  VectorXd g, h, xi;
};

GapDraw draw_gap_vectors(const ProblemSpec& spec, std::uint64_t seed) {
  GapDraw out;
  Rng g_rng(Rng::derive(seed, {4}));
  Rng h_rng(Rng::derive(seed, {5}));
  Rng xi_rng(Rng::derive(seed, {6}));
  out.g = g_rng.gauss_vector(spec.n);
  out.h = h_rng.gauss_vector(spec.dim());
  out.xi = spec.sigma * xi_rng.gauss_vector(spec.n);
  return out;
}

// Support function of {||p||_2 = rho} n {||p - c0||_2 <= R} in direction h,
// -inf when the intersection is empty. Exact closed form (sphere-cap
// geometry).
double sphere_cap_support(double rho, const VectorXd& h, const VectorXd& c0, double R) {
  const double c_norm = c0.norm();
  const double h_norm = h.norm();
  if (rho < c_norm - R - 1e-15 || rho > c_norm + R + 1e-15)
    return -std::numeric_limits<double>::infinity();
  if (c_norm == 0.0) return rho * h_norm;
  // Unconstrained spherical maximizer.
  if (h_norm == 0.0) return 0.0;
  const VectorXd p_free = (rho / h_norm) * h;
  if ((p_free - c0).norm() <= R) return rho * h_norm;
  // Otherwise the optimum lies on the two-sphere intersection where
  // <p, c0> = (rho^2 + ||c0||^2 - R^2)/2.
  const double gamma = 0.5 * (rho * rho + c_norm * c_norm - R * R);
  const double h_par = h.dot(c0) / c_norm;
  const double h_perp = std::sqrt(std::max(0.0, h_norm * h_norm - h_par * h_par));
  const double q_sq = rho * rho - gamma * gamma / (c_norm * c_norm);
  if (q_sq < -1e-12 * rho * rho) return -std::numeric_limits<double>::infinity();
  return gamma * h_par / c_norm + std::sqrt(std::max(0.0, q_sq)) * h_perp;
}

}  // namespace

ExtReal po_gap_value(const ProblemSpec& spec, Norm norm, double B, std::uint64_t seed) {
  if (norm != Norm::L2) throw UnsupportedNorm("po_gap_value: exact solver exists for l2 only");
  if (B < 0.0) return ExtReal::neg_inf();
  const Dataset ds = sample_dataset(spec, Rng::derive(seed, {3}));
  try {
    const WorstCaseResult wc = worst_case_l2_interpolator(spec, ds, B);
    return ExtReal::finite(wc.value - spec.sigma * spec.sigma);
  } catch (const Infeasible&) {
    return ExtReal::neg_inf();
  }
}

ExtReal ao_gap_value(const ProblemSpec& spec, Norm norm, double B, std::uint64_t seed) {
  if (norm != Norm::L2) throw UnsupportedNorm("ao_gap_value: l2 balls only");
  if (B < 0.0) return ExtReal::neg_inf();
  const GapDraw dr = draw_gap_vectors(spec, seed);
  const double lam_max = spec.cov.op_norm();
  if (lam_max <= 0.0) {
    // S = {0}: feasible iff the constraint holds at w2 = 0.
    return dr.xi.norm() <= 0.0 ? ExtReal::finite(0.0) : ExtReal::neg_inf();
  }

  const VectorXd& eigs = spec.cov.eigenvalues();
  const bool isotropic = spec.cov.is_diagonal() && (eigs.array() == eigs[0]).all();

  // Constraint left side as a function of rho: || xi - rho G ||_2.
  const double xi_sq = dr.xi.squaredNorm();
  const double xi_g = dr.xi.dot(dr.g);
  const double g_sq = dr.g.squaredNorm();
  auto lhs = [&](double rho) { return std::sqrt(std::max(0.0, xi_sq - 2.0 * rho * xi_g + rho * rho * g_sq)); };

  std::function<double(double)> support;  // inner max of <H, w2> at ||w2|| = rho
  VectorXd c0;
  double cap_r = 0.0;
  MatrixXd span;      // d x m orthonormal basis of the reduction span
  VectorXd h_span;    // H restricted to the span
  VectorXd inv_sqrt;  // Sigma^{-1/2} diagonal (general path)
  if (isotropic) {
    const double c = std::sqrt(eigs[0]);
    c0 = -c * spec.w_star;
    cap_r = c * B;
    support = [&](double rho) { return sphere_cap_support(rho, dr.h, c0, cap_r); };
  } else {
    if ((eigs.array() <= 0.0).any())
      throw SingularCovariance("ao_gap_value: general path needs invertible Sigma");
    // 2-D reduction to span{Sigma^{1/2}H, Sigma^{1/2}w*}.
    const VectorXd s1 = spec.cov.apply_sqrt(dr.h);
    const VectorXd s2 = spec.cov.apply_sqrt(spec.w_star);
    MatrixXd raw(spec.dim(), 2);
    raw.col(0) = s1;
    raw.col(1) = s2;
    Eigen::HouseholderQR<MatrixXd> qr(raw);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(spec.dim(), 2);
    const Index m = s2.norm() > 1e-14 * s1.norm() ? 2 : 1;
    span = q.leftCols(m);
    h_span = span.transpose() * dr.h;
    inv_sqrt = eigs.cwiseSqrt().cwiseInverse();
    support = [&, m](double rho) {
      // Maximize <h_span, t> over ||t|| = rho with membership
      // || Sigma^{-1/2}(span t) + w* || <= B, by scanning the angle.
      double best = -std::numeric_limits<double>::infinity();
      const int grid = m == 1 ? 2 : 720;
      for (int a = 0; a < grid; ++a) {
        const double theta = m == 1 ? (a == 0 ? 0.0 : M_PI)
                                    : 2.0 * M_PI * static_cast<double>(a) / grid;
        Eigen::Vector2d dir(std::cos(theta), std::sin(theta));
        VectorXd t = m == 1 ? VectorXd::Constant(1, rho * (a == 0 ? 1.0 : -1.0))
                            : VectorXd(rho * dir);
        const VectorXd p = span * t;
        const VectorXd back = inv_sqrt.cwiseProduct(p) + spec.w_star;
        if (back.norm() <= B) best = std::max(best, h_span.dot(t));
      }
      return best;
    };
  }

  auto feasible = [&](double rho) { return support(rho) >= lhs(rho); };

  const double rho_hi =
      std::max(2.0 * B * std::sqrt(lam_max), std::sqrt(lam_max) * (B + spec.w_star.norm()));
  if (rho_hi <= 0.0) {
    return feasible(0.0) ? ExtReal::finite(0.0) : ExtReal::neg_inf();
  }

  // Log-spaced scan; the feasible rho-set is an interval, so only the upper
  // endpoint matters for the max of rho^2.
  double best_rho = -1.0;
  double next_infeasible = -1.0;
  const double lo_mag = rho_hi * 1e-12;
  for (long i = kRhoGridPoints; i >= 0; --i) {
    const double rho =
        i == 0 ? 0.0
               : lo_mag * std::pow(rho_hi / lo_mag, static_cast<double>(i) / kRhoGridPoints);
    if (feasible(rho)) {
      best_rho = rho;
      break;
    }
    next_infeasible = rho;
  }
  if (best_rho < 0.0) return ExtReal::neg_inf();

  double hi = next_infeasible > 0.0 ? next_infeasible : rho_hi * (1.0 + 1e-9);
  double lo = best_rho;
  for (int it = 0; it < 80 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return ExtReal::finite(lo * lo);
}

ExtReal po_norm_value(const ProblemSpec& spec, Norm norm, std::uint64_t seed) {
  if (norm != Norm::L1 && norm != Norm::L2)
    throw UnsupportedNorm("po_norm_value supports l1 and l2");
  if ((spec.cov.eigenvalues().array() <= 0.0).any())
    throw SingularCovariance("po_norm_value requires invertible Sigma");
  Rng z_rng(Rng::derive(seed, {7}));
  Rng xi_rng(Rng::derive(seed, {8}));
  MatrixXd z(spec.n, spec.dim());
  z_rng.fill_gauss(z);
  Dataset ds;
  // After whitening, the primary problem is min-norm interpolation of pure
  // noise against a design with N(0, Sigma) rows.
  if (spec.cov.is_diagonal()) {
    ds.x = z * spec.cov.eigenvalues().cwiseSqrt().asDiagonal();
  } else {
    ds.x = ((z * spec.cov.basis()) * spec.cov.eigenvalues().cwiseSqrt().asDiagonal()) *
           spec.cov.basis().transpose();
  }
  ds.xi = spec.sigma * xi_rng.gauss_vector(spec.n);
  ds.y = ds.xi;
  ds.seed = seed;
  try {
    const InterpolatorResult res =
        norm == Norm::L2 ? min_l2_interpolator(ds) : min_l1_interpolator(ds);
    return ExtReal::finite(res.norm_value);
  } catch (const NoInterpolator&) {
    return ExtReal::pos_inf();
  }
}

ExtReal ao_norm_value(const ProblemSpec& spec, Norm norm, std::uint64_t seed) {
  if (norm != Norm::L1 && norm != Norm::L2)
    throw UnsupportedNorm("ao_norm_value supports l1 and l2");
  if ((spec.cov.eigenvalues().array() <= 0.0).any())
    throw SingularCovariance("ao_norm_value requires invertible Sigma");
  Rng h_rng(Rng::derive(seed, {9}));
  const VectorXd h = h_rng.gauss_vector(spec.dim());
  const VectorXd u = spec.cov.apply_sqrt(h);
  if (u.cwiseAbs().maxCoeff() == 0.0) return ExtReal::pos_inf();
  const VectorXd v = subgradient_dual(norm, u, spec.cov);
  const double dual_val = norm_value(dual_norm(norm), u);
  const double denom =
      dual_val * dual_val / static_cast<double>(spec.n) - spec.cov.quad_form(v);
  if (denom <= 0.0) return ExtReal::pos_inf();
  return ExtReal::finite(std::sqrt(spec.sigma * spec.sigma / denom));
}

ComparisonReport compare_tails(const ValueSampler& po, const ValueSampler& ao, long draws,
                               std::vector<double> t_grid, std::uint64_t seed, int n_threads) {
  if (draws < 500) throw LabError("compare_tails requires draws >= 500");
  std::vector<ExtReal> po_vals(draws), ao_vals(draws);
  parallel_for(draws, n_threads, [&](Index i) {
    po_vals[i] = po(Rng::derive(seed, {1, static_cast<std::uint64_t>(i)}));
    ao_vals[i] = ao(Rng::derive(seed, {2, static_cast<std::uint64_t>(i)}));
  });

  if (t_grid.empty()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto* vec : {&po_vals, &ao_vals}) {
      for (const ExtReal& v : *vec) {
        if (!v.is_finite()) continue;
        lo = std::min(lo, v.value);
        hi = std::max(hi, v.value);
      }
    }
    if (!(lo < hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    for (int i = 0; i < 20; ++i) t_grid.push_back(lo + (hi - lo) * i / 19.0);
  }
  std::sort(t_grid.begin(), t_grid.end());

  ComparisonReport rep;
  rep.draws = draws;
  const double nd = static_cast<double>(draws);
  for (double t : t_grid) {
    TailPoint pt;
    pt.t = t;
    // Both optima carry ~1e-8 solver tolerance; when a value distribution has
    // an atom (e.g. the gap problem pinned at B^2), counting the AO tail
    // without this slack turns float jitter at the atom into a false fail.
    const double atom_tol = 1e-8 * (1.0 + std::abs(t));
    long po_hits = 0, ao_hits = 0;
    for (const ExtReal& v : po_vals) po_hits += v.greater_than(t) ? 1 : 0;
    for (const ExtReal& v : ao_vals) ao_hits += v.at_least(t - atom_tol) ? 1 : 0;
    pt.po_tail = po_hits / nd;
    pt.ao_tail = ao_hits / nd;
    pt.po_se = std::sqrt(pt.po_tail * (1.0 - pt.po_tail) / nd);
    pt.ao_se = std::sqrt(pt.ao_tail * (1.0 - pt.ao_tail) / nd);
    const double combined = std::sqrt(pt.po_se * pt.po_se + 4.0 * pt.ao_se * pt.ao_se);
    pt.pass = pt.po_tail <= 2.0 * pt.ao_tail + 3.0 * combined;
    rep.all_pass = rep.all_pass && pt.pass;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace interplab
