#pragma once

#include <Eigen/Dense>

namespace tnare {

/// left * diag(core) * right^T.
///
/// Solver iterates keep left and right column-orthonormal and core
/// nonnegative and nonincreasing. A back-transformed solution (see
/// unbalance_solution) keeps the core but loses orthonormality.
struct LowRankBilinear {
  Eigen::MatrixXd left;
  Eigen::VectorXd core;
  Eigen::MatrixXd right;

  Eigen::Index rows() const { return left.rows(); }
  Eigen::Index cols() const { return right.rows(); }
  Eigen::Index rank() const { return core.size(); }

  Eigen::MatrixXd dense() const;
  /// Entry (i, j) in O(rank).
  double entry(Eigen::Index i, Eigen::Index j) const;
  /// X^T as a LowRankBilinear (swaps the factors).
  LowRankBilinear transposed() const { return {right, core, left}; }

  /// max(||L^T L - I||_max, ||R^T R - I||_max).
  double orthonormality_error() const;
  bool core_is_sorted_nonnegative() const;
};

/// ||X - Y||_F without forming either matrix; O(n r^2).
double frobenius_distance(const LowRankBilinear& x, const LowRankBilinear& y);
double frobenius_norm(const LowRankBilinear& x);

}  // namespace tnare
