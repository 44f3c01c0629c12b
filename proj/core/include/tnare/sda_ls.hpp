#pragma once

#include <Eigen/Dense>

#include <memory>
#include <utility>

#include "tnare/flop_model.hpp"
#include "tnare/low_rank.hpp"
#include "tnare/solver_config.hpp"
#include "tnare/structured_linalg.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

/// Iterate of the large-scale doubling algorithm: H_k and G_k as truncated
/// low-rank products, E_k and F_k as implicit recursive operators.
struct SdaLsState {
  LowRankBilinear h;  // Q1 Sigma Q2^T
  LowRankBilinear g;  // P1 Gamma P2^T
  ImplicitIterate e;
  ImplicitIterate f;
  int k = 0;
};

/// Full-rank factors B = b1 b2^T, C = c1 c2^T.
struct LowRankFactors {
  Eigen::MatrixXd b1, b2, c1, c2;

  /// Transport structure: B = u u^T, C = v v^T.
  static LowRankFactors from(const NareCoefficients& coefs);
};

/// How the 2 gamma factor of H_0 and G_0 is split between the left and
/// right initial blocks. Only the balanced audit uses the symmetric split.
enum class InitSplit {
  left,       // Q1 = 2g W^{-1} B1,        Q2 = (E+gI)^{-T} B2 (and likewise P)
  symmetric,  // Q1 = sqrt(2g) W^{-1} B1,  Q2 = sqrt(2g) (E+gI)^{-T} B2
};

SdaLsState sda_ls_init(std::shared_ptr<const ShiftedSolver> solver,
                       const LowRankFactors& factors, const SolverConfig& config,
                       FlopModel* flops = nullptr, InitSplit split = InitSplit::left);

/// Products formed during a step, exposed for audits.
struct SdaLsStepProducts {
  Eigen::MatrixXd e_p1;   // E_k P1
  Eigen::MatrixXd et_q2;  // E_k^T Q2
  Eigen::MatrixXd f_q1;   // F_k Q1
  Eigen::MatrixXd ft_p2;  // F_k^T P2
};

/// One doubling step k -> k+1. Throws NearCriticalError if an inner system
/// is singular and RankOverflowError if a rank exceeds config.max_rank.
void sda_ls_step(SdaLsState& state, const SolverConfig& config, FlopModel* flops = nullptr,
                 SdaLsStepProducts* products = nullptr);

struct LowRankSolution {
  LowRankBilinear x;
  SolveReport report;
};

/// Runs SDA_ls on the coefficients until the normalized residual of H_k
/// reaches config.tol_residual. Non-convergence and rank overflow are
/// reported through report.termination rather than thrown.
LowRankSolution sda_ls_solve(const NareCoefficients& coefs, const SolverConfig& config,
                             FlopModel* flops = nullptr);
LowRankSolution sda_ls_solve(const NareInstance& inst, const SolverConfig& config,
                             FlopModel* flops = nullptr);

}  // namespace tnare
