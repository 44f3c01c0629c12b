#include "tnare/block_ops.hpp"
#include "tnare/errors.hpp"
#include "tnare/structured_linalg.hpp"

namespace tnare {

ResidualNorm residual_norm(const NareCoefficients& coefs, const LowRankBilinear& x,
                           FlopModel* flops) {
  const Index n = coefs.size();
  if (x.left.rows() != n || x.right.rows() != n || x.left.cols() != x.rank() ||
      x.right.cols() != x.rank())
    throw InvalidInput("residual_norm: X does not match the problem dimension");

  // With X = L S R^T, a = X v and b = X^T v:
  //   XCX = a b^T,  XE = X D - a u^T,  AX = Delta X - u b^T,  B = u u^T
  // so  XCX - XE - AX + B = (a + u)(b + u)^T - (L S)(D R)^T - (Delta L S) R^T,
  // a product of two n x (2r + 1) blocks.
  const Index r = x.rank();
  const Eigen::MatrixXd ls = x.left * x.core.asDiagonal();
  const Eigen::VectorXd a = ls * (x.right.transpose() * coefs.v);
  const Eigen::VectorXd b = x.right * (ls.transpose() * coefs.v);

  Eigen::MatrixXd y(n, 2 * r + 1);
  Eigen::MatrixXd z(n, 2 * r + 1);
  y.col(0) = a + coefs.u;
  z.col(0) = b + coefs.u;
  y.middleCols(1, r) = ls;
  z.middleCols(1, r) = -(coefs.d.asDiagonal() * x.right);
  y.rightCols(r) = coefs.delta.asDiagonal() * ls;
  z.rightCols(r) = -x.right;

  ResidualNorm out;
  out.absolute = lowrank_product_norm(y, z);
  out.normalized = out.absolute / coefs.b_norm();
  if (flops) {
    const double w = static_cast<double>(2 * r + 1);
    const double nd = static_cast<double>(n);
    flops->add(Kernel::residual, 8.0 * nd * static_cast<double>(r) + 4.0 * nd * w * w);
  }
  return out;
}

double dense_residual_norm(const DenseCoefficients& m, const Eigen::MatrixXd& x) {
  return (x * m.C * x - x * m.E - m.A * x + m.B).norm();
}

}  // namespace tnare
