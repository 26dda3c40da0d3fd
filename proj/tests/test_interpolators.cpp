#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "interplab/interpolators.hpp"
#include "interplab/model.hpp"
#include "interplab/rng.hpp"
#include "oracles.hpp"

using namespace interplab;

namespace {

Dataset make_dataset(MatrixXd x, VectorXd y) {
  Dataset ds;
  ds.xi = VectorXd::Zero(x.rows());
  ds.x = std::move(x);
  ds.y = std::move(y);
  ds.seed = 1;
  return ds;
}

Dataset random_dataset(Index n, Index d, std::uint64_t seed, double sigma = 1.0) {
  Rng rng(Rng::derive(seed, {0xDA}));
  MatrixXd x(n, d);
  rng.fill_gauss(x);
  Dataset ds;
  ds.x = std::move(x);
  ds.xi = sigma * rng.gauss_vector(n);
  ds.y = ds.xi;
  ds.seed = seed;
  return ds;
}

ProblemSpec random_spec(Index d, std::uint64_t seed, Index n) {
  Rng rng(Rng::derive(seed, {0x59}));
  VectorXd eigs(d);
  for (Index i = 0; i < d; ++i) eigs[i] = std::exp(-0.4 * double(i)) + 0.05;
  VectorXd w = rng.gauss_vector(d);
  return ProblemSpec(CovarianceModel::diagonal(std::move(eigs)), std::move(w), 0.7, n);
}

}  // namespace

TEST_CASE("min l2: zero labels give the zero vector") {
  Dataset ds = make_dataset(MatrixXd::Random(3, 6), VectorXd::Zero(3));
  const InterpolatorResult res = min_l2_interpolator(ds);
  CHECK(res.w.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res.norm_value == 0.0);
  CHECK(res.train_loss == 0.0);
}

TEST_CASE("min l2: symmetric 1x2 system") {
  MatrixXd x(1, 2);
  x << 1.0, 1.0;
  const InterpolatorResult res = min_l2_interpolator(make_dataset(x, VectorXd::Constant(1, 2.0)));
  CHECK(res.w[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.w[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("min l2 matches the dual-system oracle on random instances") {
  for (int rep = 0; rep < 100; ++rep) {
    const Dataset ds = random_dataset(4, 8, 100 + rep);
    const InterpolatorResult res = min_l2_interpolator(ds);
    const VectorXd oracle = oracles::dual_min_norm_l2(ds.x, ds.y);
    CHECK((res.w - oracle).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("min l2 minimality: orthogonal to the nullspace, beats feasible points") {
  const Dataset ds = random_dataset(5, 12, 42);
  const InterpolatorResult res = min_l2_interpolator(ds);
  // Component orthogonal to the row span is negligible.
  const VectorXd lam = (ds.x * ds.x.transpose()).ldlt().solve(ds.x * res.w);
  const VectorXd row_part = ds.x.transpose() * lam;
  CHECK((res.w - row_part).norm() <= 1e-8 * (1.0 + res.w.norm()));

  // Any feasible point has larger norm.
  Rng rng(4242);
  Eigen::BDCSVD<MatrixXd> svd(ds.x, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const MatrixXd null_basis = svd.matrixV().rightCols(12 - 5);
  for (int i = 0; i < 100; ++i) {
    const VectorXd w_feas = res.w + null_basis * rng.gauss_vector(7);
    CHECK(res.w.norm() <= w_feas.norm() + 1e-12);
  }
}

TEST_CASE("min l2 error taxonomy") {
  // n > d: no interpolators in general position.
  CHECK_THROWS_AS(min_l2_interpolator(random_dataset(5, 3, 9)), NoInterpolator);
  // Rank-deficient design with inconsistent labels.
  MatrixXd x(2, 3);
  x << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;  // repeated direction
  VectorXd y(2);
  y << 1.0, 2.0;
  CHECK_THROWS_AS(min_l2_interpolator(make_dataset(x, y)), NoInterpolator);
  // Same design, consistent labels: fine.
  VectorXd y2(2);
  y2 << 1.5, 1.5;
  const InterpolatorResult res = min_l2_interpolator(make_dataset(x, y2));
  CHECK(res.train_loss <= 1e-12);
}

TEST_CASE("basis pursuit: zero labels") {
  const InterpolatorResult res =
      min_l1_interpolator(make_dataset(MatrixXd::Random(2, 5), VectorXd::Zero(2)));
  CHECK(res.norm_value == 0.0);
}

TEST_CASE("basis pursuit: 1x2 vertex solution") {
  MatrixXd x(1, 2);
  x << 1.0, 2.0;
  const InterpolatorResult res = min_l1_interpolator(make_dataset(x, VectorXd::Constant(1, 2.0)));
  CHECK(res.w[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(res.w[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.norm_value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("basis pursuit matches vertex enumeration and certifies the gap") {
  for (int rep = 0; rep < 50; ++rep) {
    const Dataset ds = random_dataset(3, 6, 500 + rep);
    const InterpolatorResult res = min_l1_interpolator(ds);
    const double oracle = oracles::vertex_enum_min_l1(ds.x, ds.y);
    CHECK(res.norm_value <= oracle + 1e-6);
    CHECK(res.norm_value >= oracle - 1e-6);
    CHECK(res.stats.duality_gap <= 1e-8 * (1.0 + res.norm_value));
    CHECK((ds.x * res.w - ds.y).cwiseAbs().maxCoeff() <=
          1e-8 * (1.0 + ds.y.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("min linf: 1x2 and vertex oracle") {
  MatrixXd x(1, 2);
  x << 1.0, 1.0;
  const InterpolatorResult res =
      min_linf_interpolator(make_dataset(x, VectorXd::Constant(1, 2.0)));
  CHECK(res.w[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.w[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.norm_value == doctest::Approx(1.0).epsilon(1e-8));

  for (int rep = 0; rep < 25; ++rep) {
    const Dataset ds = random_dataset(3, 6, 900 + rep);
    const InterpolatorResult r = min_linf_interpolator(ds);
    const double oracle = oracles::vertex_enum_min_linf(ds.x, ds.y);
    CHECK(std::abs(r.norm_value - oracle) <= 1e-6 * (1.0 + oracle));
  }
}

TEST_CASE("l1 ball projection") {
  Rng rng(5150);
  for (int rep = 0; rep < 200; ++rep) {
    const VectorXd v = 3.0 * rng.gauss_vector(8);
    const double radius = 0.5 + 2.0 * rng.next_unit();
    const VectorXd p = project_l1_ball(v, radius);
    CHECK(p.cwiseAbs().sum() <= radius * (1.0 + 1e-12));
    // Projection is no farther than any random feasible point.
    for (int probe = 0; probe < 20; ++probe) {
      VectorXd q = rng.gauss_vector(8);
      q *= radius * rng.next_unit() / q.cwiseAbs().sum();
      CHECK((v - p).squaredNorm() <= (v - q).squaredNorm() + 1e-10);
    }
    // Idempotence.
    CHECK((project_l1_ball(p, radius) - p).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(project_l1_ball(VectorXd::Ones(4), 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("worst case l2: singleton ball returns the min-norm point") {
  const ProblemSpec spec = random_spec(6, 77, 3);
  const Dataset ds = sample_dataset(spec, 77);
  const InterpolatorResult fit = min_l2_interpolator(spec, ds);
  const WorstCaseResult wc = worst_case_l2_interpolator(spec, ds, fit.norm_value);
  CHECK((wc.w - fit.w).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + fit.norm_value));
  CHECK(wc.value == doctest::Approx(fit.pop_loss).epsilon(1e-10));
  CHECK(wc.certificate == WorstCaseResult::Certificate::exact);
}

TEST_CASE("worst case l2: zero covariance is flat at sigma^2") {
  VectorXd zero = VectorXd::Zero(4);
  ProblemSpec spec(CovarianceModel::diagonal(zero), VectorXd::Zero(4), 1.5, 2);
  Dataset ds = random_dataset(2, 4, 31);
  const WorstCaseResult wc = worst_case_l2_interpolator(spec, ds, 10.0);
  CHECK(wc.value == doctest::Approx(1.5 * 1.5).epsilon(1e-12));
}

TEST_CASE("worst case l2 beats random search and satisfies KKT") {
  for (int rep = 0; rep < 20; ++rep) {
    const ProblemSpec spec = random_spec(6, 1000 + rep, 3);
    const Dataset ds = sample_dataset(spec, 2000 + rep);
    const InterpolatorResult fit = min_l2_interpolator(spec, ds);
    const double B = 2.0 * fit.norm_value;
    const WorstCaseResult wc = worst_case_l2_interpolator(spec, ds, B);
    CHECK(wc.kkt_residual <= 1e-8);
    CHECK(wc.value >= fit.pop_loss - 1e-12);  // sandwich at the min-norm point
    const double oracle = oracles::random_search_worst_case(spec, ds, B, 20000, 3000 + rep);
    CHECK(wc.value >= oracle - 1e-8);
    // Feasibility of the maximizer.
    CHECK((ds.x * wc.w - ds.y).cwiseAbs().maxCoeff() <=
          1e-8 * (1.0 + ds.y.cwiseAbs().maxCoeff()));
    CHECK(wc.w.norm() <= B * (1.0 + 1e-10));
  }
}

TEST_CASE("worst case l2 is monotone in B") {
  const ProblemSpec spec = random_spec(8, 4321, 4);
  const Dataset ds = sample_dataset(spec, 4321);
  const double b0 = min_l2_interpolator(ds).norm_value;
  double prev = -1.0;
  for (double factor : {1.0, 1.2, 1.5, 2.0, 3.0, 5.0}) {
    const WorstCaseResult wc = worst_case_l2_interpolator(spec, ds, factor * b0);
    CHECK(wc.value >= prev - 1e-10);
    prev = wc.value;
  }
  CHECK_THROWS_AS(worst_case_l2_interpolator(spec, ds, 0.5 * b0), Infeasible);
}

TEST_CASE("worst case l1 witness") {
  const ProblemSpec spec = random_spec(5, 616, 3);
  const Dataset ds = sample_dataset(spec, 616);
  const InterpolatorResult bp = min_l1_interpolator(spec, ds);

  // Singleton ball: the witness is the basis pursuit point.
  const WorstCaseResult tight = worst_case_l1_witness(spec, ds, bp.norm_value, 4);
  CHECK(tight.value == doctest::Approx(bp.pop_loss).epsilon(1e-6));
  CHECK(tight.certificate == WorstCaseResult::Certificate::lower_bound_witness);

  const double B = 1.8 * bp.norm_value;
  const WorstCaseResult wc = worst_case_l1_witness(spec, ds, B, 8);
  // Feasible, and no better than the l2-ball maximum at the same radius.
  CHECK(wc.w.cwiseAbs().sum() <= B * (1.0 + 1e-10));
  CHECK((ds.x * wc.w - ds.y).cwiseAbs().maxCoeff() <=
        1e-8 * (1.0 + ds.y.cwiseAbs().maxCoeff()));
  const WorstCaseResult l2_relax = worst_case_l2_interpolator(spec, ds, B);
  CHECK(wc.value <= l2_relax.value + 1e-9);

  // Beats random feasible points.
  Rng rng(777);
  Eigen::BDCSVD<MatrixXd> svd(ds.x, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const MatrixXd nb = svd.matrixV().rightCols(2);
  double best_random = 0.0;
  for (int i = 0; i < 20000; ++i) {
    VectorXd w = bp.w + nb * rng.gauss_vector(2);
    const double l1 = w.cwiseAbs().sum();
    if (l1 > B) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((bp.w + mid * (w - bp.w)).cwiseAbs().sum() <= B ? lo : hi) = mid;
      }
      w = bp.w + lo * (w - bp.w);
    }
    best_random = std::max(best_random, population_loss(spec, w));
  }
  CHECK(wc.value >= best_random - 1e-8);

  CHECK_THROWS_AS(worst_case_l1_witness(spec, ds, 0.9 * bp.norm_value, 2), Infeasible);
}

TEST_CASE("interpolation certificate holds across solvers") {
  for (int rep = 0; rep < 10; ++rep) {
    const Dataset ds = random_dataset(4, 9, 4000 + rep);
    for (const InterpolatorResult& res :
         {min_l2_interpolator(ds), min_l1_interpolator(ds), min_linf_interpolator(ds)}) {
      CHECK(res.train_loss <= 1e-8 * (1.0 + ds.y.squaredNorm() / ds.n()));
      CHECK(res.norm_value ==
            doctest::Approx(norm_value(res.norm_used, res.w)).epsilon(1e-12));
    }
  }
}
