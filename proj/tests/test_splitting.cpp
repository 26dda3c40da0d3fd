#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "interplab/rng.hpp"
#include "interplab/splitting.hpp"

using namespace interplab;

namespace {

CovarianceModel diag_cov(std::initializer_list<double> eigs) {
  VectorXd v(static_cast<Index>(eigs.size()));
  Index i = 0;
  for (double e : eigs) v[i++] = e;
  return CovarianceModel::diagonal(std::move(v));
}

}  // namespace

TEST_CASE("top-k splits") {
  const CovarianceModel cov = diag_cov({5.0, 1.0, 1.0});
  const CovSplit s0 = split_top_k(cov, 0);
  CHECK(s0.rank1() == 0);
  CHECK(s0.eigs2(cov) == cov.eigenvalues());

  const CovSplit s1 = split_top_k(cov, 1);
  const VectorXd e2 = s1.eigs2(cov);
  CHECK(e2[0] == 0.0);
  CHECK(e2[1] == 1.0);
  const CovView part2 = part2_view(cov, s1);
  const auto [r2, R2] = effective_ranks_l2(part2);
  CHECK(r2 == doctest::Approx(2.0));
  CHECK(R2 == doctest::Approx(2.0));

  const CovSplit sd = split_top_k(cov, 3);
  CHECK(part2_view(cov, sd).is_zero());

  CHECK_THROWS_AS(split_top_k(cov, 4), KOutOfRange);
  CHECK_THROWS_AS(split_top_k(cov, -1), KOutOfRange);
}

TEST_CASE("split preserves the eigenvalue multiset and orthogonality") {
  Rng rng(8);
  VectorXd eigs(20);
  for (Index i = 0; i < 20; ++i) eigs[i] = std::exp(-0.2 * double(i));
  const CovarianceModel cov = CovarianceModel::diagonal(eigs);
  for (Index k : {Index(0), Index(3), Index(11), Index(20)}) {
    const CovSplit split = split_top_k(cov, k);
    const VectorXd e1 = split.eigs1(cov);
    const VectorXd e2 = split.eigs2(cov);
    CHECK((e1 + e2 - eigs).cwiseAbs().maxCoeff() == 0.0);
    CHECK(e1.cwiseProduct(e2).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("optimize_split prefers no split on a flat spectrum") {
  VectorXd eigs = VectorXd::Ones(64);
  const CovarianceModel cov = CovarianceModel::diagonal(eigs);
  ProblemSpec spec(cov, VectorXd::Zero(64), 1.0, 32);
  const OptimizeSplitResult res =
      optimize_split(spec, 0.1, BoundFamily::euclid_risk, Norm::L2, 2.0);
  CHECK(res.k_star == 0);
  for (const auto& entry : res.scan) {
    CHECK(res.report.value <= entry.report.value + 1e-12);
  }
}

TEST_CASE("optimize_split isolates a spike") {
  VectorXd eigs(64);
  eigs[0] = 100.0;
  for (Index i = 1; i < 64; ++i) eigs[i] = 1.0;
  const CovarianceModel cov = CovarianceModel::diagonal(eigs);
  ProblemSpec spec(cov, VectorXd::Zero(64), 1.0, 32);
  const OptimizeSplitResult res =
      optimize_split(spec, 0.1, BoundFamily::euclid_risk, Norm::L2, 2.0);
  CHECK(res.k_star == 1);
  const double at0 = res.scan[0].report.value;
  const double at1 = res.scan[1].report.value;
  CHECK(at1 < at0);
}

TEST_CASE("optimize_split on a single dimension returns a two-point argmin") {
  VectorXd eigs = VectorXd::Ones(1);
  ProblemSpec spec(CovarianceModel::diagonal(eigs), VectorXd::Zero(1), 1.0, 4);
  const OptimizeSplitResult res =
      optimize_split(spec, 0.1, BoundFamily::main, Norm::L2, 1.0, {500, 3});
  CHECK((res.k_star == 0 || res.k_star == 1));
  CHECK(res.scan.size() == 2);
}

TEST_CASE("optimize_split is reproducible") {
  VectorXd eigs(32);
  for (Index i = 0; i < 32; ++i) eigs[i] = 1.0 / (1.0 + double(i));
  ProblemSpec spec(CovarianceModel::diagonal(eigs), VectorXd::Zero(32), 0.5, 16);
  const McSettings mc{2000, 21};
  const OptimizeSplitResult a = optimize_split(spec, 0.1, BoundFamily::main, Norm::L2, 1.5, mc);
  const OptimizeSplitResult b = optimize_split(spec, 0.1, BoundFamily::main, Norm::L2, 1.5, mc);
  CHECK(a.k_star == b.k_star);
  CHECK(a.report.value == b.report.value);
}

TEST_CASE("tau split formulas") {
  // Flat tail of m ones: a = b = m, tau = (m/n)^{3/4} > 1, so no tail entry
  // reaches the threshold and S_tau is empty.
  VectorXd eigs = VectorXd::Ones(1024);
  const CovarianceModel cov = CovarianceModel::diagonal(eigs);
  const TauSplitInfo info = tau_split_info(cov, 0, 16);
  CHECK(info.a == doctest::Approx(1024.0));
  CHECK(info.b == doctest::Approx(1024.0));
  CHECK(info.tau == doctest::Approx(std::pow(1024.0 / 16.0, 0.75)).epsilon(1e-12));
  CHECK(info.s_tau.empty());
  CHECK(info.split.rank1() == 0);

  // One huge tail entry gets removed.
  VectorXd spik(64);
  spik[0] = 50.0;
  for (Index i = 1; i < 64; ++i) spik[i] = 1.0;
  const CovarianceModel cov2 = CovarianceModel::diagonal(spik);
  const TauSplitInfo info2 = tau_split_info(cov2, 0, 16);
  REQUIRE(!info2.s_tau.empty());
  CHECK(info2.s_tau.front() == 0);

  // Degenerate tail.
  VectorXd z(4);
  z << 1.0, 0.0, 0.0, 0.0;
  const CovarianceModel cov3 = CovarianceModel::diagonal(z);
  CHECK_THROWS_AS(tau_split(cov3, 1, 8), DegenerateTail);
}

TEST_CASE("tau split proof displays hold on random spectra") {
  Rng rng(4711);
  for (int rep = 0; rep < 20; ++rep) {
    const Index d = 30 + static_cast<Index>(rng.next_unit() * 200);
    VectorXd eigs(d);
    for (Index i = 0; i < d; ++i) eigs[i] = std::exp(2.0 * rng.next_gauss());
    std::sort(eigs.data(), eigs.data() + d, std::greater<double>());
    const CovarianceModel cov = CovarianceModel::diagonal(eigs);
    const Index k = static_cast<Index>(rng.next_unit() * (d / 4));
    const Index n = 4 + static_cast<Index>(rng.next_unit() * 60);
    const TauSplitInfo info = tau_split_info(cov, k, n);
    const double ratio = std::pow(double(n) / info.a, 0.75);  // = b/(tau a)
    CHECK(info.kept_l1 >= (1.0 - ratio) * info.tail_l1 - 1e-9 * info.tail_l1);
    CHECK(static_cast<double>(info.s_tau.size()) <=
          info.a * std::pow(double(n) / info.a, 1.5) + 1e-9);
  }
}
