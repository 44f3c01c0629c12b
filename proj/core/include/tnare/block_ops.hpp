#pragma once

#include <Eigen/Dense>

#include "tnare/flop_model.hpp"

namespace tnare {

/// Result of orthogonalizing new directions y against an orthonormal basis q:
///
///   [q, y] = [q, q_hat] * [ I  s ]
///                         [ 0  r ]
///
/// q_hat has as many columns as the numerical rank of (I - q q^T) y, so r is
/// (rank x y.cols()) and need not be square.
struct BasisExtension {
  Eigen::MatrixXd q_hat;
  Eigen::MatrixXd s;
  Eigen::MatrixXd r;
};

/// Two-pass classical Gram-Schmidt against q, then QR of the remainder with
/// an SVD of its triangular factor to drop directions at roundoff level.
BasisExtension extend_basis(const Eigen::MatrixXd& q, const Eigen::MatrixXd& y,
                            FlopModel* flops = nullptr);

/// Thin SVD m = u diag(s) v^T with s descending, truncated to the values
/// s_i > 0 with s_i >= trunc_rel * s_0. Signs are fixed so the
/// largest-magnitude entry of each column of u is positive (first such
/// entry on ties), which makes the factors reproducible.
struct TruncatedSvd {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, double trunc_rel,
                           FlopModel* flops = nullptr);

/// ||y z^T||_F via thin QR of both factors; O(n (cols)^2).
double lowrank_product_norm(const Eigen::MatrixXd& y, const Eigen::MatrixXd& z);

/// Upper-triangular R of a thin Householder QR (min(rows, cols) x cols).
Eigen::MatrixXd thin_r(const Eigen::MatrixXd& m);

/// Frobenius distance between a and b after flipping each column of b to
/// best match a. Infinite if the shapes differ.
double sign_aligned_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace tnare
