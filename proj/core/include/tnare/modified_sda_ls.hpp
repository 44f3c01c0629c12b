#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

#include "tnare/flop_model.hpp"
#include "tnare/low_rank.hpp"
#include "tnare/sda_ls.hpp"
#include "tnare/solver_config.hpp"
#include "tnare/structured_linalg.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

/// Doubling state for the balanced equation. On the balanced problem the
/// G-side factors coincide with the H-side ones (P1 = Q2, P2 = Q1,
/// Gamma = Sigma) and E_k, F_k are symmetric, so only H = Q1 Sigma Q2^T and
/// the two implicit operators are kept.
struct ModifiedState {
  LowRankBilinear h;
  ImplicitIterate e;
  ImplicitIterate f;
  int k = 0;
};

/// Requires symmetric coefficients (u == v), i.e. a balanced instance.
ModifiedState msda_init(std::shared_ptr<const ShiftedSolver> solver, const Eigen::VectorXd& phi,
                        const SolverConfig& config, FlopModel* flops = nullptr);

/// One step with two implicit block products (E_k Q2, F_k Q1) and two
/// block orthogonalizations.
void msda_step(ModifiedState& state, const SolverConfig& config, FlopModel* flops = nullptr);

/// Balances, iterates on the balanced equation and maps X back to the
/// original scale. Stops when the balanced residual meets the tolerance and
/// the original residual confirms it.
LowRankSolution msda_solve(const NareInstance& inst, const SolverConfig& config,
                           FlopModel* flops = nullptr);

/// Per-iteration deviations from the symmetric relations between the H-
/// and G-side quantities of SDA_ls run on a balanced instance. All entries
/// are relative to the size of the compared blocks; factor comparisons are
/// made up to the sign of each column.
///
/// Factor columns are weighted by their singular values: a column whose
/// value sits near the truncation threshold is only determined to about
/// eps * sigma_max / sigma_j, so its raw entries are not comparable. The
/// unweighted per-column distances are kept in raw_* for inspection and
/// do not enter max_deviation().
struct SymmetryRecord {
  int k = 0;
  double q1_vs_p2 = 0.0;      // ||(Q1 - P2) Sigma|| / ||Sigma||
  double q2_vs_p1 = 0.0;      // ||(Q2 - P1) Sigma|| / ||Sigma||
  double raw_q1_vs_p2 = 0.0;  // ||Q1 - P2|| / sqrt(m)
  double raw_q2_vs_p1 = 0.0;
  double sigma_vs_gamma = 0.0;
  double e_symmetry = 0.0;    // probe |x^T E y - y^T E x| / (|x||y| scale)
  double f_symmetry = 0.0;
  double h_vs_gt = 0.0;       // ||H - G^T|| / ||H||
  double ep1_vs_etq2 = 0.0;   // ||(E P1 - E^T Q2) Sigma|| / ||E P1 Sigma||
  double fq1_vs_ftp2 = 0.0;   // ||(F Q1 - F^T P2) Sigma|| / ||F Q1 Sigma||
  double msda_vs_sda = 0.0;   // ||H_msda - H_sda|| / ||H_sda||

  double max_deviation() const;
};

struct SymmetryAudit {
  std::vector<SymmetryRecord> records;
  double max_deviation() const;
};

/// Runs SDA_ls with the symmetric initial factors on the balanced instance
/// for k_max steps next to the modified iteration and records the
/// deviations. Limited to n <= 256.
SymmetryAudit audit_symmetry(const BalancedInstance& binst, const SolverConfig& config,
                             int k_max);

}  // namespace tnare
