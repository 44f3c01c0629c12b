#include <algorithm>
#include <cmath>
#include <sstream>

#include "tnare/errors.hpp"
#include "tnare/structured_linalg.hpp"

namespace tnare {

namespace {
constexpr Index kRowPanel = 512;
}  // namespace

double gamma_select(const NareCoefficients& coefs) {
  const Eigen::ArrayXd uv = coefs.u.array() * coefs.v.array();
  const double e_max = (coefs.d.array() - uv).maxCoeff();
  const double a_max = (coefs.delta.array() - uv).maxCoeff();
  return std::max(e_max, a_max);
}

DiagonalMinusRankOne::DiagonalMinusRankOne(Eigen::VectorXd diag, Eigen::VectorXd a,
                                           Eigen::VectorXd b, double sigma)
    : diag_(std::move(diag)), a_(std::move(a)), b_(std::move(b)), sigma_(sigma) {
  if (a_.size() != diag_.size() || b_.size() != diag_.size())
    throw InvalidInput("DiagonalMinusRankOne: vector sizes differ");
  if ((diag_.array() == 0.0).any())
    throw NearCriticalError("DiagonalMinusRankOne: zero diagonal entry");
  inv_diag_ = diag_.cwiseInverse();
  inv_diag_a_ = inv_diag_.cwiseProduct(a_);
  inv_diag_b_ = inv_diag_.cwiseProduct(b_);
  denom_ = 1.0 - sigma_ * b_.dot(inv_diag_a_);
  if (std::abs(denom_) < kSmwSingularThreshold) {
    std::ostringstream msg;
    msg << "Sherman-Morrison denominator " << denom_
        << " is numerically zero (near-critical instance)";
    throw NearCriticalError(msg.str());
  }
}

Eigen::MatrixXd DiagonalMinusRankOne::apply(const Eigen::MatrixXd& x, bool transpose) const {
  const auto& left = transpose ? b_ : a_;
  const auto& right = transpose ? a_ : b_;
  Eigen::MatrixXd y = diag_.asDiagonal() * x;
  y.noalias() -= (sigma_ * left) * (right.transpose() * x);
  return y;
}

Eigen::MatrixXd DiagonalMinusRankOne::solve(const Eigen::MatrixXd& x, bool transpose) const {
  // (G - s a b^T)^{-1} x = G^{-1} x + s G^{-1} a (b^T G^{-1} x) / (1 - s b^T G^{-1} a)
  const auto& inv_left = transpose ? inv_diag_b_ : inv_diag_a_;
  const auto& right = transpose ? a_ : b_;
  Eigen::MatrixXd y = inv_diag_.asDiagonal() * x;
  const Eigen::RowVectorXd t = (sigma_ / denom_) * (right.transpose() * y);
  y.noalias() += inv_left * t;
  return y;
}

Eigen::MatrixXd DiagonalMinusRankOne::dense() const {
  return Eigen::MatrixXd(diag_.asDiagonal()) - sigma_ * a_ * b_.transpose();
}

ShiftedSolver::ShiftedSolver(const NareCoefficients& coefs, double gamma) : gamma_(gamma) {
  const Index n = coefs.size();
  if (coefs.d.size() != n || coefs.u.size() != n || coefs.v.size() != n)
    throw InvalidInput("ShiftedSolver: coefficient vectors differ in length");
  if (!(gamma > 0.0)) throw InvalidInput("ShiftedSolver: gamma must be positive");

  const Eigen::VectorXd e_diag = coefs.d.array() + gamma;
  const Eigen::VectorXd a_diag = coefs.delta.array() + gamma;
  e_shift_ = DiagonalMinusRankOne(e_diag, coefs.v, coefs.u, 1.0);
  a_shift_ = DiagonalMinusRankOne(a_diag, coefs.u, coefs.v, 1.0);

  // B (E + gI)^{-1} C = u (u^T (E + gI)^{-1} v) v^T, so W stays diagonal
  // minus rank one; likewise V.
  const double s_w = coefs.u.dot(e_shift_.solve(coefs.v).col(0));
  const double s_v = coefs.v.dot(a_shift_.solve(coefs.u).col(0));
  w_ = DiagonalMinusRankOne(a_diag, coefs.u, coefs.v, 1.0 + s_w);
  v_ = DiagonalMinusRankOne(e_diag, coefs.v, coefs.u, 1.0 + s_v);
}

const DiagonalMinusRankOne& ShiftedSolver::op(Op which) const {
  switch (which) {
    case Op::e_shift: return e_shift_;
    case Op::a_shift: return a_shift_;
    case Op::w: return w_;
    case Op::v: return v_;
  }
  return w_;
}

Eigen::MatrixXd ShiftedSolver::solve(Op which, const Eigen::MatrixXd& x, bool transpose) const {
  if (x.rows() != size()) throw InvalidInput("ShiftedSolver::solve: block row count != n");
  return op(which).solve(x, transpose);
}

Eigen::MatrixXd ShiftedSolver::apply(Op which, const Eigen::MatrixXd& x, bool transpose) const {
  if (x.rows() != size()) throw InvalidInput("ShiftedSolver::apply: block row count != n");
  return op(which).apply(x, transpose);
}

BaseOperator::BaseOperator(std::shared_ptr<const ShiftedSolver> solver, Kind kind)
    : solver_(std::move(solver)), kind_(kind) {
  const auto& m = solver_->op(kind_ == Kind::e0 ? ShiftedSolver::Op::v : ShiftedSolver::Op::w);
  const double two_gamma = 2.0 * solver_->gamma();
  scale_ = (1.0 - two_gamma * m.inv_diag().array()).matrix();
  left_ = m.inv_diag_a();
  right_ = m.inv_diag_b();
  coef_ = -two_gamma * m.sm_factor();
}

Eigen::MatrixXd BaseOperator::apply(const Eigen::MatrixXd& x, bool transpose,
                                    FlopModel* flops) const {
  const auto& l = transpose ? right_ : left_;
  const auto& r = transpose ? left_ : right_;
  // Row panels keep the slices of scale_, l and r in L1 while the block
  // streams past; otherwise the cost per entry jumps once n outgrows L1.
  const Index n = x.rows();
  const Index cols = x.cols();
  Eigen::RowVectorXd t = Eigen::RowVectorXd::Zero(cols);
  for (Index i = 0; i < n; i += kRowPanel) {
    const Index h = std::min(kRowPanel, n - i);
    t.noalias() += r.segment(i, h).transpose() * x.middleRows(i, h);
  }
  t *= coef_;
  Eigen::MatrixXd y(n, cols);
  for (Index i = 0; i < n; i += kRowPanel) {
    const Index h = std::min(kRowPanel, n - i);
    const auto s = scale_.segment(i, h);
    const auto li = l.segment(i, h);
    for (Index j = 0; j < cols; ++j)
      y.col(j).segment(i, h) = s.cwiseProduct(x.col(j).segment(i, h)) + t(j) * li;
  }
  if (flops) {
    const double per_column = kFlopsPerEntry * static_cast<double>(x.rows());
    flops->add_base_applications(static_cast<std::uint64_t>(x.cols()), per_column);
    flops->add(Kernel::implicit_apply, per_column * static_cast<double>(x.cols()));
  }
  return y;
}

std::pair<BaseOperator, BaseOperator> make_base_operators(
    std::shared_ptr<const ShiftedSolver> solver) {
  return {BaseOperator(solver, BaseOperator::Kind::e0),
          BaseOperator(solver, BaseOperator::Kind::f0)};
}

}  // namespace tnare
