#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dyner/errors.hpp"
#include "dyner/graph_sim.hpp"
#include "dyner/random.hpp"
#include "dyner/spectral.hpp"
#include "dyner/theory.hpp"
#include "oracles.hpp"

using namespace dyner;

namespace {

const SpectralConfig kDefault{};
const EdgeParams kStationary(1.0, 1.0, 0.5, 2.0);

void expect_certified(const Eigen::MatrixXd& a, const SpectralResult& r, const SpectralConfig& c) {
  EXPECT_NEAR(r.vector.norm(), 1.0, 1e-12);
  EXPECT_GE(r.vector.sum(), 0.0);
  const double residual = (a * r.vector - r.mu * r.vector).norm();
  EXPECT_LE(residual, c.rel_tol * std::max(1.0, std::abs(r.mu)));
  EXPECT_NEAR(residual, r.residual, 1e-12 * std::max(1.0, std::abs(r.mu)));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST(SpectralConfig, Validation) {
  EXPECT_NO_THROW(kDefault.validate());
  EXPECT_THROW((SpectralConfig{0.0, 10, true}.validate()), DomainError);
  EXPECT_THROW((SpectralConfig{1e-10, 0, true}.validate()), DomainError);
}

TEST(PrincipalEig, Examples) {
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(7, 7);
  const SpectralResult r1 = principal_eig(ones, kDefault);
  EXPECT_NEAR(r1.mu, 7.0, 1e-12);
  EXPECT_LT((r1.vector - Eigen::VectorXd::Constant(7, 1.0 / std::sqrt(7.0))).norm(), 1e-9);
  expect_certified(ones, r1, kDefault);

  const SpectralResult r0 = principal_eig(Eigen::MatrixXd::Zero(5, 5), kDefault);
  EXPECT_EQ(r0.mu, 0.0);
  EXPECT_EQ(r0.residual, 0.0);
  EXPECT_LT((r0.vector - Eigen::VectorXd::Constant(5, 1.0 / std::sqrt(5.0))).norm(), 1e-15);

  Eigen::MatrixXd tri(3, 3);
  tri << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  const SpectralResult r2 = principal_eig(tri, kDefault);
  EXPECT_NEAR(r2.mu, 2.0, 1e-10);
  expect_certified(tri, r2, kDefault);
}

TEST(PrincipalEig, RejectsBadInput) {
  EXPECT_THROW(principal_eig(Eigen::MatrixXd::Zero(2, 3), kDefault), DomainError);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
  asym(0, 1) = 1.0;
  EXPECT_THROW(principal_eig(asym, kDefault), DomainError);
}

TEST(PrincipalEig, ConvergenceErrorCarriesResidual) {
  Stream rng(3);
  const Eigen::MatrixXd a = oracle::random_01(60, 0.5, rng);
  try {
    principal_eig(a, SpectralConfig{1e-14, 1, false});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_residual(), 0.0);
  }
}

TEST(PrincipalEig, MatchesJacobiOracleOnSmallMatrices) {
  Stream rng(21);
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform() * 8.0);
    const double density = rng.uniform();
    const Eigen::MatrixXd a = oracle::random_01(n, density, rng, rng.uniform() < 0.5);
    const SpectralResult r = principal_eig(a, kDefault);
    ASSERT_NEAR(r.mu, oracle::jacobi_eigenvalues(a).back(), 1e-9) << "matrix " << k;
    ASSERT_GE(r.mu, 0.0);
    expect_certified(a, r, kDefault);
  }
}

TEST(PrincipalEig, RayleighLowerBound) {
  Stream rng(22);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + static_cast<int>(rng.uniform() * 30.0);
    const Eigen::MatrixXd a = oracle::random_01(n, rng.uniform(), rng);
    const SpectralResult r = principal_eig(a, kDefault);
    const Eigen::VectorXd e = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    EXPECT_GE(r.mu, e.dot(a * e) - 1e-12);
    EXPECT_NEAR(e.dot(a * e), a.sum() / n, 1e-12);
    for (int s = 0; s < 100; ++s) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = rng.normal();
      x.normalize();
      ASSERT_GE(r.mu, x.dot(a * x) - 1e-9);
    }
  }
}

TEST(PrincipalEig, AddingAnEdgeNeverDecreasesMu) {
  Stream rng(23);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + static_cast<int>(rng.uniform() * 11.0);
    Eigen::MatrixXd a = oracle::random_01(n, rng.uniform(), rng);
    const double before = principal_eig(a, kDefault).mu;
    ASSERT_NEAR(before, oracle::jacobi_eigenvalues(a).back(), 1e-9);
    const int i = static_cast<int>(rng.uniform() * n);
    const int j = static_cast<int>(rng.uniform() * n);
    a(i, j) = a(j, i) = 1.0;
    ASSERT_GE(principal_eig(a, kDefault).mu, before - 1e-9);
  }
}

TEST(PrincipalEig, WarmStartMatchesCold) {
  Stream rng(24);
  const Eigen::MatrixXd a = oracle::random_01(50, 0.4, rng);
  const SpectralResult cold = principal_eig(a, kDefault);
  Eigen::MatrixXd b = a;
  b(3, 4) = b(4, 3) = 1.0 - b(3, 4);
  const SpectralResult warm = principal_eig(b, kDefault, cold.vector);
  const SpectralResult cold_b = principal_eig(b, kDefault);
  EXPECT_NEAR(warm.mu, cold_b.mu, 2.0 * kDefault.rel_tol * cold_b.mu);
  EXPECT_LE(warm.iters, cold_b.iters);
}

TEST(EigPath, ConstantGraphGivesConstantValues) {
  std::vector<EdgePath> paths(6, EdgePath(EdgeState::kPresent, {}, 2.0));
  paths[1] = EdgePath(EdgeState::kAbsent, {}, 2.0);
  const GraphTrajectory g(3, kStationary, paths);
  const TimeGrid grid({0.0, 0.5, 1.0, 1.5, 2.0}, 2.0);
  const auto path = eig_path(g, grid, kDefault);
  ASSERT_EQ(path.size(), 5u);
  for (const SpectralResult& r : path) EXPECT_NEAR(r.mu, path.front().mu, 1e-12);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(path[j].t, grid[j]);
}

TEST(EigPath, WarmAndColdAgreeOnFuzzedTrajectories) {
  const TimeGrid grid({0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}, 2.0);
  SpectralConfig cold = kDefault;
  cold.warm_start = false;
  for (int r = 0; r < 10; ++r) {
    const GraphTrajectory g = sample_graph(50, EdgeParams(1.5, 0.7, 0.2, 2.0), 31, r);
    const auto warm_path = eig_path(g, grid, kDefault);
    const auto cold_path = eig_path(g, grid, cold);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      ASSERT_NEAR(warm_path[j].mu, cold_path[j].mu, 2.0 * kDefault.rel_tol * std::abs(cold_path[j].mu));
      expect_certified(g.adjacency_at(grid[j]), warm_path[j], kDefault);
    }
  }
}

TEST(EigPath, FailureIsTaggedWithGridIndex) {
  const GraphTrajectory g = sample_graph(40, kStationary, 32, 0);
  const TimeGrid grid({0.0, 1.0}, 2.0);
  try {
    eig_path(g, grid, SpectralConfig{1e-14, 1, true});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    ASSERT_TRUE(e.grid_index().has_value());
    EXPECT_EQ(*e.grid_index(), 0u);
  }
}

TEST(MuStar, InversionAndRoundTrip) {
  const int n = 30;
  const double t = 0.4;
  const double p = edge_prob(kStationary, t);
  SpectralResult r;
  r.vector = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  r.mu = std::sqrt(n * p * (1.0 - p));
  EXPECT_NEAR(mu_star(r, kStationary, t), 1.0, 1e-15);
  r.mu = 17.25;
  EXPECT_NEAR(mu_star(r, kStationary, t) * std::sqrt(n * p * (1.0 - p)), 17.25, 1e-12);
}

TEST(MuStar, StationaryValueNearSqrtNq) {
  const GraphTrajectory g = sample_graph(400, kStationary, 33, 0);
  const SpectralResult r = principal_eig(g.adjacency_at(1.0), kDefault);
  // sqrt(N q) = 20 with q = 1; the remainder is of order (log N)^2 / sqrt(N).
  EXPECT_NEAR(mu_star(r, kStationary, 1.0), 20.0, 0.5);
}

TEST(QuadraticForms, ZeroOrderAndFirstOrderIdentity) {
  for (int r = 0; r < 5; ++r) {
    const GraphTrajectory g = sample_graph(60, EdgeParams(1.0, 2.0, 0.3, 2.0), 34, r);
    const CenteredMatrix h = g.centered_matrix_at(0.6);
    const auto forms = quadratic_form_powers(h, 3);
    ASSERT_EQ(forms.size(), 4u);
    EXPECT_EQ(forms[0], 1.0);
    EXPECT_NEAR(forms[1], h.matrix().sum() / 60.0, 1e-12);
    const Eigen::VectorXd e = Eigen::VectorXd::Constant(60, 1.0 / std::sqrt(60.0));
    EXPECT_NEAR(forms[3], e.dot(h.matrix() * (h.matrix() * (h.matrix() * e))), 1e-12);
  }
}

TEST(QuadraticForms, RejectsOrderOutOfRange) {
  const CenteredMatrix h = sample_graph(20, kStationary, 35, 0).centered_matrix_at(0.0);
  const int cap = static_cast<int>(std::ceil(std::log(20.0))) + 2;
  EXPECT_NO_THROW(quadratic_form_powers(h, cap));
  EXPECT_THROW(quadratic_form_powers(h, cap + 1), DomainError);
  EXPECT_THROW(quadratic_form_powers(h, -1), DomainError);
}

TEST(QuadraticForms, SecondOrderHasUnitMean) {
  const int reps = 400;
  std::vector<double> x;
  for (int r = 0; r < reps; ++r)
    x.push_back(quadratic_form_powers(sample_graph(40, EdgeParams(1.0, 2.0, 0.3, 2.0), 36, r).centered_matrix_at(1.0), 2)[2]);
  double m = 0.0;
  for (double v : x) m += v;
  m /= reps;
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  EXPECT_NEAR(m, 1.0, 4.0 * std::sqrt(ss / (reps - 1) / reps));
}

TEST(SeriesEig, ZeroCenteredMatrixGivesSqrtNq) {
  const double t = 0.5;
  const double p = edge_prob(kStationary, t);
  const CenteredMatrix h(Eigen::MatrixXd::Zero(50, 50), t, p);
  EXPECT_NEAR(series_eig(h, kStationary, 0, kDefault), std::sqrt(50.0 * p / (1.0 - p)), 1e-12);
}

TEST(SeriesEig, SelfConsistentAndMatchesDirectSolver) {
  for (int r = 0; r < 5; ++r) {
    const GraphTrajectory g = sample_graph(200, kStationary, 37, r);
    const CenteredMatrix h = g.centered_matrix_at(1.0);
    const int k = default_truncation(200) + 2;
    const double mu = series_eig(h, kStationary, k, kDefault);
    const auto forms = quadratic_form_powers(h, k);
    const double sqrt_nq = std::sqrt(200.0 * h.q());
    EXPECT_NEAR(series_rhs(sqrt_nq, forms, k, mu), mu, kDefault.rel_tol * mu * 2.0);
    const double direct = mu_star(principal_eig(g.adjacency_at(1.0), kDefault), kStationary, 1.0);
    EXPECT_NEAR(mu, direct, 1e-7 * direct);
  }
}

TEST(SeriesEig, DefaultTruncation) {
  EXPECT_EQ(default_truncation(200), 6);
  EXPECT_EQ(default_truncation(1000), 7);
  EXPECT_EQ(default_truncation(3), 2);
}

TEST(SeriesEig, FirstOrderTruncationGapShrinksWithN) {
  std::vector<double> gap;
  for (int n : {100, 400, 1600}) {
    std::vector<double> d;
    for (int r = 0; r < 8; ++r) {
      const CenteredMatrix h = sample_graph(n, kStationary, 38, r).centered_matrix_at(1.0);
      d.push_back(std::abs(series_eig(h, kStationary, 1, kDefault) - series_eig(h, kStationary, 0, kDefault)));
    }
    gap.push_back(median(d));
  }
  EXPECT_GT(gap[0], gap[1]);
  EXPECT_GT(gap[1], gap[2]);
}

TEST(SpectralNorm, ZeroAndOracle) {
  EXPECT_EQ(spectral_norm(Eigen::MatrixXd::Zero(6, 6), kDefault), 0.0);
  Stream rng(39);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform() * 8.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
    const auto ev = oracle::jacobi_eigenvalues(a);
    ASSERT_NEAR(spectral_norm(a, kDefault), std::max(std::abs(ev.front()), std::abs(ev.back())), 1e-8);
  }
}

TEST(SpectralNorm, EntryBoundAndSemicircleEdge) {
  const TheoryCurves curves(kStationary);
  int inside = 0;
  const int reps = 100;
  for (int r = 0; r < reps; ++r) {
    const CenteredMatrix h = sample_graph(1000, kStationary, 40, r).centered_matrix_at(1.0);
    const double norm = spectral_norm(h.matrix(), SpectralConfig{1e-6, 100000, false});
    ASSERT_LE(norm, curves.entry_bound_constant() * std::sqrt(1000.0));
    inside += norm >= 1.95 && norm <= 2.3;
  }
  EXPECT_GE(inside, 95);
}
