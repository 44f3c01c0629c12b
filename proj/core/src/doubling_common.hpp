#pragma once

// Pieces shared by the large-scale solvers. Not installed.

#include <Eigen/Dense>

#include <chrono>
#include <functional>
#include <string>

#include "tnare/block_ops.hpp"
#include "tnare/flop_model.hpp"
#include "tnare/low_rank.hpp"
#include "tnare/solver_config.hpp"

namespace tnare::detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline double dbl(Eigen::Index v) { return static_cast<double>(v); }

/// Truncated SVD of the core, then basis1 * U, basis2 * V.
LowRankBilinear compress(const Eigen::MatrixXd& basis1, const Eigen::MatrixXd& basis2,
                         const Eigen::MatrixXd& core, double trunc_rel, FlopModel* flops);

/// [I s; 0 r] as a dense (m + p) x (m + q) block.
Eigen::MatrixXd extension_triangle(Eigen::Index m, const BasisExtension& ext);

/// [left, right] side by side.
Eigen::MatrixXd hcat(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right);

/// Block diagonal of two square matrices.
Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// LU of a small inner matrix; throws NearCriticalError naming the iteration.
Eigen::PartialPivLU<Eigen::MatrixXd> inner_lu(const Eigen::MatrixXd& m, int k, const char* what);

/// Throws RankOverflowError if rank > max_rank.
void check_rank(Eigen::Index rank, int max_rank, int k, const char* which);

/// Callbacks driving one solve; the loop owns stopping, cadence and timing.
struct DoublingHooks {
  std::function<void(FlopModel*)> step;
  /// Stopping residual of the current iterate (normalized).
  std::function<double(FlopModel*)> residual;
  /// Optional second check once the stopping residual is met.
  std::function<bool()> confirm;
  std::function<int()> rank_h;
  std::function<int()> rank_g;
  std::function<Eigen::VectorXd()> core;
};

/// Runs steps until the stopping rule holds or max_iter is reached, filling
/// report.iterations, initial_residual and termination. Rank overflow and
/// near-critical failures end the loop with the matching termination.
void run_doubling(const DoublingHooks& hooks, const SolverConfig& config, FlopModel& flops,
                  SolveReport& report);

}  // namespace tnare::detail
