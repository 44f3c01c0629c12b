#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "test_support.hpp"
#include "tnare/dense_sda.hpp"
#include "tnare/errors.hpp"
#include "tnare/sda_ls.hpp"

namespace tnare {
namespace {

std::shared_ptr<const ShiftedSolver> solver_for(const NareCoefficients& c) {
  return std::make_shared<const ShiftedSolver>(c, gamma_select(c));
}

SdaLsState init_for(const NareCoefficients& c, const SolverConfig& cfg, FlopModel* fm = nullptr) {
  return sda_ls_init(solver_for(c), LowRankFactors::from(c), cfg, fm);
}

TEST(SdaLs, ScalarInitialFactors) {
  const NareCoefficients c = testing::scalar_instance().coefficients();
  const SdaLsState s = init_for(c, SolverConfig{});
  EXPECT_EQ(s.h.rank(), 1);
  EXPECT_NEAR(s.h.dense()(0, 0), 6.0 / 35.0, 1e-15);
  EXPECT_NEAR(s.g.dense()(0, 0), 6.0 / 35.0, 1e-15);
  EXPECT_NEAR(s.h.core(0), 6.0 / 35.0, 1e-15);
}

TEST(SdaLs, ScalarFirstStep) {
  const NareCoefficients c = testing::scalar_instance().coefficients();
  SdaLsState s = init_for(c, SolverConfig{});
  sda_ls_step(s, SolverConfig{});
  EXPECT_EQ(s.k, 1);
  EXPECT_NEAR(s.h.dense()(0, 0), 204.0 / 1189.0, 1e-15);
}

TEST(SdaLs, ScalarSolve) {
  const LowRankSolution sol = sda_ls_solve(testing::scalar_instance(), SolverConfig{});
  EXPECT_TRUE(sol.report.converged());
  EXPECT_NEAR(sol.x.dense()(0, 0), testing::kScalarRoot, 1e-12);
  EXPECT_LE(sol.report.iteration_count(), 6);
}

TEST(SdaLs, InitialIterateMatchesDense) {
  const NareInstance inst = build_instance(TransportParams{0.9, 0.1, 64});
  const NareCoefficients c = inst.coefficients();
  const DenseSdaState d = dense_sda_init(assemble_dense(c), gamma_select(c));
  SolverConfig cfg;
  cfg.trunc_rel = 0.0;
  const SdaLsState s = init_for(c, cfg);
  EXPECT_LE(testing::rel_diff(s.h.dense(), d.h), 1e-14);
  EXPECT_LE(testing::rel_diff(s.g.dense(), d.g), 1e-14);
  EXPECT_EQ(s.h.rank(), 1);
}

TEST(SdaLs, FactorsStayOrthonormalAndSorted) {
  const NareCoefficients c = build_instance(TransportParams{0.5, 0.5, 64}).coefficients();
  SolverConfig cfg;
  SdaLsState s = init_for(c, cfg);
  for (int k = 0; k < 6; ++k) {
    sda_ls_step(s, cfg);
    EXPECT_LE(s.h.orthonormality_error(), 1e-13) << "k=" << k;
    EXPECT_LE(s.g.orthonormality_error(), 1e-13) << "k=" << k;
    EXPECT_TRUE(s.h.core_is_sorted_nonnegative());
    EXPECT_TRUE(s.g.core_is_sorted_nonnegative());
    EXPECT_LE(s.h.rank(), 2 * (k + 2));
  }
}

TEST(SdaLs, IteratesTrackDense) {
  const NareCoefficients c = build_instance(TransportParams{0.999, 0.001, 32}).coefficients();
  SolverConfig cfg;
  cfg.trunc_rel = 0.0;
  DenseSdaState d = dense_sda_init(assemble_dense(c), gamma_select(c));
  SdaLsState s = init_for(c, cfg);
  for (int k = 0; k < 8; ++k) {
    dense_sda_step(d);
    sda_ls_step(s, cfg);
    EXPECT_LE((s.h.dense() - d.h).norm() / d.h.norm(), 1e-11) << "k=" << k;
    EXPECT_LE((s.g.dense() - d.g).norm() / d.g.norm(), 1e-11) << "k=" << k;
  }
}

TEST(SdaLs, SolveMatchesDense) {
  for (const auto& [cc, alpha] : {std::pair{0.5, 0.5}, std::pair{0.9, 0.1}}) {
    const NareInstance inst = build_instance(TransportParams{cc, alpha, 64});
    const DenseSolution d = dense_sda_solve(inst, SolverConfig{});
    const LowRankSolution s = sda_ls_solve(inst, SolverConfig{});
    EXPECT_TRUE(s.report.converged() || s.report.termination == Termination::stagnated);
    EXPECT_LE(s.report.final_residual, 1e-11);
    EXPECT_LE((s.x.dense() - d.x).norm() / d.x.norm(), 1e-10);
  }
}

TEST(SdaLs, FourImplicitBlockApplicationsPerStep) {
  const NareCoefficients c = build_instance(TransportParams{0.5, 0.5, 32}).coefficients();
  FlopModel fm;
  SolverConfig cfg;
  SdaLsState s = init_for(c, cfg, &fm);
  fm.close_initialization();
  for (int k = 0; k < 4; ++k) {
    sda_ls_step(s, cfg, &fm);
    const FlopSnapshot snap = fm.snapshot(k);
    EXPECT_EQ(snap.implicit_block_applications, 4u);
    EXPECT_GT(snap[Kernel::implicit_apply], 0.0);
  }
}

TEST(SdaLs, ProductsExposed) {
  const NareCoefficients c = build_instance(TransportParams{0.5, 0.5, 16}).coefficients();
  SolverConfig cfg;
  SdaLsState s = init_for(c, cfg);
  SdaLsStepProducts p;
  const LowRankBilinear g = s.g;
  const LowRankBilinear h = s.h;
  const Eigen::MatrixXd e0 = s.e.apply(Eigen::MatrixXd::Identity(16, 16));
  sda_ls_step(s, cfg, nullptr, &p);
  EXPECT_LE(testing::rel_diff(p.e_p1, e0 * g.left), 1e-14);
  EXPECT_LE(testing::rel_diff(p.et_q2, e0.transpose() * h.right), 1e-14);
}

TEST(SdaLs, RankOverflowReported) {
  SolverConfig cfg;
  cfg.max_rank = 3;
  const LowRankSolution sol = sda_ls_solve(build_instance(TransportParams{0.5, 0.5, 64}), cfg);
  EXPECT_EQ(sol.report.termination, Termination::rank_overflow);
  EXPECT_FALSE(sol.report.warnings.empty());
}

TEST(SdaLs, MaxIterationsReported) {
  SolverConfig cfg;
  cfg.max_iter = 2;
  const LowRankSolution sol = sda_ls_solve(build_instance(TransportParams{0.9, 0.1, 64}), cfg);
  EXPECT_EQ(sol.report.termination, Termination::max_iterations);
  EXPECT_EQ(sol.report.iteration_count(), 2);
  EXPECT_GT(sol.report.final_residual, cfg.tol_residual);
}

TEST(SdaLs, CadenceSkipsResiduals) {
  SolverConfig cfg;
  cfg.residual_cadence = 3;
  const LowRankSolution sol = sda_ls_solve(build_instance(TransportParams{0.5, 0.5, 16}), cfg);
  ASSERT_GE(sol.report.iteration_count(), 3);
  EXPECT_LT(sol.report.iterations[0].residual, 0.0);
  EXPECT_GE(sol.report.iterations[2].residual, 0.0);
}

TEST(SdaLs, CoreChangeStoppingRule) {
  SolverConfig cfg;
  cfg.stopping = StoppingRule::core_change;
  const LowRankSolution sol = sda_ls_solve(build_instance(TransportParams{0.5, 0.5, 16}), cfg);
  EXPECT_TRUE(sol.report.converged());
  EXPECT_LE(sol.report.final_residual, 1e-10);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.trunc_rel = 0.0;
  EXPECT_NO_THROW(cfg.validate());
  cfg.tol_residual = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = SolverConfig{};
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(SolverConfig, Stagnation) {
  EXPECT_FALSE(residual_stagnated(1e-3, 1e-3));
  EXPECT_FALSE(residual_stagnated(1e-9, 1e-14));
  EXPECT_TRUE(residual_stagnated(1e-11, 5e-12));
  EXPECT_TRUE(residual_stagnated(1e-11, 2e-11));
  EXPECT_EQ(termination_label(Termination::stagnated), "stagnated");
}

}  // namespace
}  // namespace tnare
