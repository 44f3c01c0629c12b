#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>

#include "test_support.hpp"
#include "tnare/dense_sda.hpp"
#include "tnare/errors.hpp"
#include "tnare/structured_linalg.hpp"

namespace tnare {
namespace {

// Minimal solution from the invariant subspace of [E -C; B -A] for the
// eigenvalues with positive real part: X = V2 V1^{-1}.
Eigen::MatrixXd eigen_oracle(const DenseCoefficients& m) {
  const Index n = m.A.rows();
  Eigen::MatrixXd h(2 * n, 2 * n);
  h << m.E, -m.C, m.B, -m.A;
  Eigen::EigenSolver<Eigen::MatrixXd> es(h);
  Eigen::MatrixXcd v1(n, n), v2(n, n);
  Index col = 0;
  for (Index j = 0; j < 2 * n; ++j) {
    if (es.eigenvalues()(j).real() > 0.0) {
      v1.col(col) = es.eigenvectors().col(j).head(n);
      v2.col(col) = es.eigenvectors().col(j).tail(n);
      ++col;
    }
  }
  EXPECT_EQ(col, n);
  const Eigen::MatrixXcd x = v1.transpose().lu().solve(v2.transpose()).transpose();
  return x.real();
}

SolverConfig tight() {
  SolverConfig c;
  c.tol_residual = 1e-13;
  return c;
}

TEST(DenseSda, ScalarInitialIterate) {
  const DenseCoefficients m = assemble_dense(testing::scalar_instance());
  const DenseSdaState s = dense_sda_init(m, 3.0);
  EXPECT_NEAR(s.h(0, 0), 6.0 / 35.0, 1e-15);
  EXPECT_NEAR(s.g(0, 0), 6.0 / 35.0, 1e-15);
  EXPECT_NEAR(s.e(0, 0), -1.0 / 35.0, 1e-15);
  EXPECT_NEAR(s.f(0, 0), -1.0 / 35.0, 1e-15);
}

TEST(DenseSda, ScalarFirstStep) {
  DenseSdaState s = dense_sda_init(assemble_dense(testing::scalar_instance()), 3.0);
  dense_sda_step(s);
  EXPECT_EQ(s.k, 1);
  EXPECT_NEAR(s.h(0, 0), 204.0 / 1189.0, 1e-15);
}

TEST(DenseSda, ScalarSolution) {
  const DenseSolution sol = dense_sda_solve(testing::scalar_instance(), tight());
  EXPECT_TRUE(sol.report.converged());
  EXPECT_NEAR(sol.x(0, 0), testing::kScalarRoot, 1e-14);
  EXPECT_NEAR(sol.y(0, 0), testing::kScalarRoot, 1e-14);
  EXPECT_LE(sol.report.iteration_count(), 6);
}

TEST(DenseSda, ZeroCouplingKeepsHZero) {
  DenseCoefficients m;
  m.A = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  m.E = Eigen::Vector3d(2.0, 3.0, 4.0).asDiagonal();
  m.B = Eigen::MatrixXd::Zero(3, 3);
  m.C = Eigen::MatrixXd::Zero(3, 3);
  DenseSdaState s = dense_sda_init(m, 4.0);
  for (int k = 0; k < 4; ++k) dense_sda_step(s);
  EXPECT_EQ(s.h, Eigen::MatrixXd::Zero(3, 3));
  EXPECT_EQ(s.g, Eigen::MatrixXd::Zero(3, 3));
  // E_k = E_0^(2^k) is diagonal with entries (g - e)/(g + e) raised to 16.
  for (Index i = 0; i < 3; ++i) {
    const double r = (4.0 - m.E(i, i)) / (4.0 + m.E(i, i));
    EXPECT_NEAR(s.e(i, i), std::pow(r, 16), 1e-15);
  }
}

TEST(DenseSda, MatchesEigenOracle) {
  for (const auto& [c, alpha] : {std::pair{0.5, 0.5}, std::pair{0.9, 0.1}, std::pair{0.999, 0.001}}) {
    for (Index n : {2, 8, 16}) {
      const NareInstance inst = build_instance(TransportParams{c, alpha, n});
      const DenseCoefficients m = assemble_dense(inst);
      const DenseSolution sol = dense_sda_solve(inst, tight());
      EXPECT_TRUE(sol.report.converged()) << "n=" << n << " c=" << c;
      const Eigen::MatrixXd oracle = eigen_oracle(m);
      EXPECT_LE(testing::rel_diff(sol.x, oracle), 1e-10) << "n=" << n << " c=" << c;
    }
  }
}

TEST(DenseSda, ResidualAndDualResidual) {
  const NareInstance inst = build_instance(TransportParams{0.9, 0.1, 32});
  const DenseCoefficients m = assemble_dense(inst);
  const DenseSolution sol = dense_sda_solve(inst, SolverConfig{});
  ASSERT_TRUE(sol.report.converged());
  EXPECT_LE(dense_residual_norm(m, sol.x) / m.B.norm(), 1e-11);
  EXPECT_LE(dense_dual_residual(m, sol.y), 1e-11);
  EXPECT_LE(sol.report.final_residual, 1e-12);
}

TEST(DenseSda, SolutionIsPositive) {
  const DenseSolution sol = dense_sda_solve(build_instance(TransportParams{0.999, 0.001, 32}), SolverConfig{});
  EXPECT_GT(sol.x.minCoeff(), 0.0);
  EXPECT_GT(sol.y.minCoeff(), 0.0);
}

TEST(DenseSda, BalancedDualIsTranspose) {
  const BalancedInstance b = balance(build_instance(TransportParams{0.5, 0.5, 16}));
  const DenseSolution sol = dense_sda_solve(b.coefficients(), tight());
  ASSERT_TRUE(sol.report.converged());
  EXPECT_LE(testing::rel_diff(sol.y, sol.x.transpose()), 1e-12);
}

TEST(DenseSda, IteratesIncreaseMonotonically) {
  const NareInstance inst = build_instance(TransportParams{0.9, 0.1, 12});
  const DenseSolution sol = dense_sda_solve(inst, tight(), true);
  ASSERT_GE(sol.h_history.size(), 3u);
  for (std::size_t k = 1; k < sol.h_history.size(); ++k)
    EXPECT_GE((sol.h_history[k] - sol.h_history[k - 1]).minCoeff(), -1e-14) << "k=" << k;
  EXPECT_EQ(sol.h_history.size(), sol.report.iterations.size() + 1);
}

TEST(DenseSda, ENormsGoToZero) {
  const DenseSolution sol = dense_sda_solve(build_instance(TransportParams{0.5, 0.5, 16}), tight());
  const auto& it = sol.report.iterations;
  ASSERT_GE(it.size(), 4u);
  for (const auto& rec : it) EXPECT_GE(rec.e_norm, 0.0);
  // Terminal phase squares the error.
  const double last = it.back().e_norm;
  const double before = it[it.size() - 2].e_norm;
  EXPECT_LE(last, 10.0 * before * before + 1e-14);
  EXPECT_LT(last, 1e-6);
}

TEST(DenseSda, RejectsLargeN) {
  EXPECT_THROW(dense_sda_solve(build_instance(TransportParams{0.5, 0.5, 600}), SolverConfig{}),
               InvalidInput);
}

TEST(SpectralCheck, ScalarEigenvalues) {
  const SpectralReport r = spectral_check(testing::scalar_instance());
  ASSERT_EQ(r.h_eigenvalues.size(), 2u);
  EXPECT_NEAR(r.h_eigenvalues[0].real(), 2.0 * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(r.h_eigenvalues[1].real(), -2.0 * std::sqrt(2.0), 1e-14);
  std::vector<double> k;
  for (const auto& z : r.k_eigenvalues) k.push_back(z.real());
  std::sort(k.begin(), k.end());
  EXPECT_NEAR(k[0], 2.0, 1e-14);
  EXPECT_NEAR(k[1], 4.0, 1e-14);
  EXPECT_NEAR(r.match_distance, 4.0 - 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(SpectralCheck, RejectsLargeN) {
  EXPECT_THROW(spectral_check(build_instance(TransportParams{0.5, 0.5, 65})), InvalidInput);
}

TEST(Hausdorff, Basics) {
  using C = std::complex<double>;
  EXPECT_EQ(hausdorff_distance({C(1, 0), C(2, 0)}, {C(2, 0), C(1, 0)}), 0.0);
  EXPECT_NEAR(hausdorff_distance({C(0, 0)}, {C(3, 4)}), 5.0, 1e-15);
  EXPECT_NEAR(hausdorff_distance({C(0, 0), C(10, 0)}, {C(0, 0)}), 10.0, 1e-15);
}

}  // namespace
}  // namespace tnare
