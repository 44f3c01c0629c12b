#pragma once

#include <Eigen/Dense>

#include <memory>
#include <utility>
#include <vector>

#include "tnare/flop_model.hpp"
#include "tnare/low_rank.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

/// gamma = max_i max(e_ii, a_ii). For both the original and the balanced
/// structure the diagonals are d_i - u_i v_i and delta_i - u_i v_i.
double gamma_select(const NareCoefficients& coefs);

/// Below this magnitude a Sherman-Morrison denominator counts as singular.
inline constexpr double kSmwSingularThreshold = 1e-14;

/// M = diag(g) - sigma a b^T with an O(n m) Sherman-Morrison solve.
class DiagonalMinusRankOne {
 public:
  DiagonalMinusRankOne() = default;
  /// Throws NearCriticalError if M is numerically singular.
  DiagonalMinusRankOne(Eigen::VectorXd diag, Eigen::VectorXd a, Eigen::VectorXd b,
                       double sigma);

  Index size() const { return diag_.size(); }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x, bool transpose = false) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& x, bool transpose = false) const;
  /// Dense M, for tests.
  Eigen::MatrixXd dense() const;

  /// Flops of one solve per column, divided by n.
  static constexpr double kSolveFlopsPerEntry = 5.0;

 private:
  Eigen::VectorXd diag_;
  Eigen::VectorXd a_;
  Eigen::VectorXd b_;
  double sigma_ = 0.0;

 public:
  // Pieces of the inverse, diag^{-1} + sm_factor * (diag^{-1} a)(diag^{-1} b)^T.
  const Eigen::VectorXd& inv_diag() const { return inv_diag_; }
  const Eigen::VectorXd& inv_diag_a() const { return inv_diag_a_; }
  const Eigen::VectorXd& inv_diag_b() const { return inv_diag_b_; }
  double sm_factor() const { return sigma_ / denom_; }

 private:
  Eigen::VectorXd inv_diag_;
  Eigen::VectorXd inv_diag_a_;  // diag^{-1} a
  Eigen::VectorXd inv_diag_b_;  // diag^{-1} b
  double denom_ = 1.0;          // 1 - sigma b^T diag^{-1} a
};

/// The four shifted operators of the doubling initialization:
///
///   E + gamma I = diag(d + gamma) - v u^T
///   A + gamma I = diag(delta + gamma) - u v^T
///   W = A + gamma I - B (E + gamma I)^{-1} C = diag(delta + gamma) - (1 + s_W) u v^T
///   V = E + gamma I - C (A + gamma I)^{-1} B = diag(d + gamma) - (1 + s_V) v u^T
///
/// with s_W = u^T (E + gamma I)^{-1} v and s_V = v^T (A + gamma I)^{-1} u.
/// Immutable once built.
class ShiftedSolver {
 public:
  enum class Op { e_shift, a_shift, w, v };

  ShiftedSolver(const NareCoefficients& coefs, double gamma);

  double gamma() const { return gamma_; }
  Index size() const { return e_shift_.size(); }

  Eigen::MatrixXd solve(Op op, const Eigen::MatrixXd& x, bool transpose = false) const;
  Eigen::MatrixXd apply(Op op, const Eigen::MatrixXd& x, bool transpose = false) const;
  const DiagonalMinusRankOne& op(Op which) const;

 private:
  double gamma_;
  DiagonalMinusRankOne e_shift_;
  DiagonalMinusRankOne a_shift_;
  DiagonalMinusRankOne w_;
  DiagonalMinusRankOne v_;
};

/// Level-0 doubling operator: E_0 = I - 2 gamma V^{-1} or F_0 = I - 2 gamma W^{-1}.
class BaseOperator {
 public:
  enum class Kind { e0, f0 };

  BaseOperator(std::shared_ptr<const ShiftedSolver> solver, Kind kind);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x, bool transpose, FlopModel* flops) const;
  Index size() const { return solver_->size(); }
  Kind kind() const { return kind_; }

  /// One shifted solve plus x - 2 gamma y.
  static constexpr double kFlopsPerEntry = DiagonalMinusRankOne::kSolveFlopsPerEntry + 2.0;

 private:
  std::shared_ptr<const ShiftedSolver> solver_;
  Kind kind_;
  // I - 2g M^{-1} = diag(scale) + coef * left right^T, fused so a block
  // application is one pass over x plus a rank-one product.
  Eigen::VectorXd scale_;
  Eigen::VectorXd left_;
  Eigen::VectorXd right_;
  double coef_ = 0.0;
};

/// Handles (E_0, F_0) sharing one solver.
std::pair<BaseOperator, BaseOperator> make_base_operators(
    std::shared_ptr<const ShiftedSolver> solver);

/// E_k = E_{k-1}^2 + U_k V_k^T, held as the base operator plus the list of
/// rank updates. Only products with blocks are available; the operator is
/// never formed. Applying level k costs 2^k base applications per column.
class ImplicitIterate {
 public:
  explicit ImplicitIterate(BaseOperator base) : base_(std::move(base)) {}

  int level() const { return static_cast<int>(updates_.size()); }
  Index size() const { return base_.size(); }
  const BaseOperator& base() const { return base_; }
  const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& updates() const {
    return updates_;
  }

  /// Appends level k+1 = (level k)^2 + u v^T.
  void push_update(Eigen::MatrixXd u, Eigen::MatrixXd v);

  /// E_k x (or E_k^T x). Counts one implicit block application plus the
  /// base applications and rank-update products it triggers.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x, bool transpose = false,
                        FlopModel* flops = nullptr) const;

 private:
  Eigen::MatrixXd apply_level(int level, const Eigen::MatrixXd& x, bool transpose,
                              FlopModel* flops) const;

  BaseOperator base_;
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> updates_;
};

struct ResidualNorm {
  double absolute = 0.0;    // ||XCX - XE - AX + B||_F
  double normalized = 0.0;  // absolute / ||B||_F
};

/// Residual of the NARE for a low-rank X, evaluated from the factors in
/// O(n r^2). Throws InvalidInput on a dimension mismatch.
ResidualNorm residual_norm(const NareCoefficients& coefs, const LowRankBilinear& x,
                           FlopModel* flops = nullptr);

/// Dense residual for small problems (oracle).
double dense_residual_norm(const DenseCoefficients& m, const Eigen::MatrixXd& x);

}  // namespace tnare
