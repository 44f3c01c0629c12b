#include "tnare/low_rank.hpp"

#include "tnare/block_ops.hpp"

namespace tnare {

Eigen::MatrixXd LowRankBilinear::dense() const {
  return left * core.asDiagonal() * right.transpose();
}

double LowRankBilinear::entry(Eigen::Index i, Eigen::Index j) const {
  return (left.row(i).transpose().array() * core.array() * right.row(j).transpose().array()).sum();
}

double LowRankBilinear::orthonormality_error() const {
  const Eigen::Index r = rank();
  if (r == 0) return 0.0;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(r, r);
  const double el = (left.transpose() * left - eye).cwiseAbs().maxCoeff();
  const double er = (right.transpose() * right - eye).cwiseAbs().maxCoeff();
  return std::max(el, er);
}

bool LowRankBilinear::core_is_sorted_nonnegative() const {
  for (Eigen::Index i = 0; i < core.size(); ++i) {
    if (core[i] < 0.0) return false;
    if (i > 0 && core[i] > core[i - 1]) return false;
  }
  return true;
}

double frobenius_norm(const LowRankBilinear& x) {
  return lowrank_product_norm(x.left * x.core.asDiagonal(), x.right);
}

double frobenius_distance(const LowRankBilinear& x, const LowRankBilinear& y) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd l(n, x.rank() + y.rank());
  Eigen::MatrixXd r(x.cols(), x.rank() + y.rank());
  l << x.left * x.core.asDiagonal(), -(y.left * y.core.asDiagonal());
  r << x.right, y.right;
  return lowrank_product_norm(l, r);
}

}  // namespace tnare
