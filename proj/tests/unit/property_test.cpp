#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "tnare/dense_sda.hpp"
#include "tnare/modified_sda_ls.hpp"
#include "tnare/sda_ls.hpp"

namespace tnare {
namespace {

// Random (c, alpha, n) away from the critical corner.
TransportParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(0.05, 0.99);
  std::uniform_real_distribution<double> alpha(0.0, 0.9);
  std::uniform_int_distribution<Index> n(1, 40);
  return {c(rng), alpha(rng), n(rng)};
}

class RandomInstances : public ::testing::TestWithParam<int> {};

TEST_P(RandomInstances, SolversAgree) {
  std::mt19937_64 rng(1000 + GetParam());
  const TransportParams p = random_params(rng);
  SCOPED_TRACE(::testing::Message() << "n=" << p.n << " c=" << p.c << " alpha=" << p.alpha);
  const NareInstance inst = build_instance(p);
  const DenseSolution d = dense_sda_solve(inst, SolverConfig{});
  ASSERT_TRUE(d.report.converged());
  const LowRankSolution a = sda_ls_solve(inst, SolverConfig{});
  const LowRankSolution m = msda_solve(inst, SolverConfig{});
  const Eigen::MatrixXd xa = a.x.dense();
  const Eigen::MatrixXd xm = m.x.dense();
  EXPECT_LE((xa - d.x).norm() / d.x.norm(), 1e-10);
  EXPECT_LE((xm - d.x).norm() / d.x.norm(), 1e-10);
  EXPECT_GE(xm.minCoeff(), -1e-12);
  EXPECT_LE(m.report.final_residual, 1e-11);

  // The minimal solution is entrywise positive and the dual matches the
  // transpose relation of the balanced problem.
  EXPECT_GT(d.x.minCoeff(), 0.0);
  const Eigen::VectorXd phi = inst.q.cwiseSqrt();
  const Eigen::MatrixXd xb = phi.asDiagonal() * d.x * phi.asDiagonal();
  const Eigen::MatrixXd yb = phi.asDiagonal().inverse() * d.y * phi.asDiagonal().inverse();
  EXPECT_LE((xb.transpose() - yb).norm() / xb.norm(), 1e-10);
}

TEST_P(RandomInstances, BalanceIsSimilarity) {
  std::mt19937_64 rng(2000 + GetParam());
  const TransportParams p = random_params(rng);
  const NareInstance inst = build_instance(p);
  const DenseCoefficients o = assemble_dense(inst);
  const DenseCoefficients b = assemble_dense(balance(inst));
  const Eigen::VectorXd phi = inst.q.cwiseSqrt();
  const Eigen::MatrixXd ph = phi.asDiagonal();
  const Eigen::MatrixXd pi = phi.cwiseInverse().asDiagonal();
  EXPECT_LE(testing::rel_diff(ph * o.A * pi, b.A), 1e-14);
  EXPECT_LE(testing::rel_diff(pi * o.E * ph, b.E), 1e-14);
  EXPECT_LE(testing::rel_diff(ph * o.B * ph, b.B), 1e-14);
  EXPECT_LE(testing::rel_diff(pi * o.C * pi, b.C), 1e-14);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomInstances, ::testing::Range(0, 12));

}  // namespace
}  // namespace tnare
