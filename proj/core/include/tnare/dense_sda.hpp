#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "tnare/solver_config.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

/// Dense doubling iterate for small problems; the correctness oracle.
struct DenseSdaState {
  Eigen::MatrixXd e, f, g, h;
  int k = 0;
  double gamma = 0.0;
};

/// E_0 = I - 2g V^{-1}, F_0 = I - 2g W^{-1}, G_0 = 2g (E+gI)^{-1} C W^{-1},
/// H_0 = 2g W^{-1} B (E+gI)^{-1}. Throws NearCriticalError on singular W, V.
DenseSdaState dense_sda_init(const DenseCoefficients& m, double gamma);

/// One doubling step. Throws NearCriticalError if I - G H is singular.
void dense_sda_step(DenseSdaState& state);

struct DenseSolution {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;  // dual solution, lim G_k
  SolveReport report;
  /// Iterates H_0, H_1, ... when requested.
  std::vector<Eigen::MatrixXd> h_history;
};

/// Iterates until the normalized residual of H_k is <= config.tol_residual.
/// n must not exceed kDefaultDenseCap.
DenseSolution dense_sda_solve(const NareCoefficients& coefs, const SolverConfig& config,
                              bool keep_history = false);
DenseSolution dense_sda_solve(const NareInstance& inst, const SolverConfig& config,
                              bool keep_history = false);

/// Dense residual of the dual equation YBY - YA - EY + C = 0, normalized by ||C||_F.
double dense_dual_residual(const DenseCoefficients& m, const Eigen::MatrixXd& y);

struct SpectralReport {
  /// Eigenvalues of H = [E -C; B -A] ordered by nonincreasing real part.
  std::vector<std::complex<double>> h_eigenvalues;
  std::vector<std::complex<double>> k_eigenvalues;
  /// Hausdorff distance between spec(K) and {l_1..l_n} U {-l_{n+1}..-l_{2n}}.
  double match_distance = 0.0;
};

/// Builds H and K = [E -C; -B A] densely. n <= 64.
SpectralReport spectral_check(const DenseCoefficients& m);
SpectralReport spectral_check(const NareInstance& inst);

/// Hausdorff distance between two finite point sets in the complex plane.
double hausdorff_distance(const std::vector<std::complex<double>>& a,
                          const std::vector<std::complex<double>>& b);

}  // namespace tnare
