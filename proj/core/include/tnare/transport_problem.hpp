#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>

#include "tnare/low_rank.hpp"

namespace tnare {

using Index = Eigen::Index;

/// Largest n for which dense coefficient matrices may be assembled.
inline constexpr Index kDefaultDenseCap = 512;

/// Physical parameters of the transport model.
struct TransportParams {
  double c = 0.5;
  double alpha = 0.5;
  Index n = 1;

  /// Throws InvalidInput unless 0 < c <= 1, 0 <= alpha < 1 and n >= 1.
  void validate() const;

  /// c = 1 and alpha = 0 make K singular; solvers still run but warn.
  bool near_critical() const { return c == 1.0 && alpha == 0.0; }
};

/// Nodes (omega) and weights (c_i) of an n-point rule on (0, 1).
/// omega is stored in strictly decreasing order, so omega[0] is the largest node.
struct Quadrature {
  Eigen::VectorXd omega;
  Eigen::VectorXd weights;

  Index size() const { return omega.size(); }

  /// Throws InvalidInput if the nodes are not strictly decreasing in (0, 1),
  /// a weight is nonpositive, or the weights do not sum to one within 1e-14.
  void validate() const;
};

/// n-point Gauss-Legendre rule mapped to (0, 1), nodes descending.
Quadrature gauss_legendre(Index n);

/// Coefficient structure shared by the original and the balanced equation:
///
///   A = diag(delta) - u v^T,  B = u u^T,  C = v v^T,  E = diag(d) - v u^T.
///
/// The original transport equation has u = e, v = q; the balanced one has
/// u = v = phi.
struct NareCoefficients {
  Eigen::VectorXd delta;
  Eigen::VectorXd d;
  Eigen::VectorXd u;
  Eigen::VectorXd v;

  Index size() const { return delta.size(); }
  bool symmetric() const { return u.size() == v.size() && u == v; }
  /// ||B||_F = ||u||^2, the residual normalizer.
  double b_norm() const { return u.squaredNorm(); }
};

/// Transport NARE  XCX - XE - AX + B = 0  with A = Delta - e q^T, B = e e^T,
/// C = q q^T, E = D - q e^T.  Nothing of size n x n is stored.
struct NareInstance {
  TransportParams params;
  Eigen::VectorXd delta;
  Eigen::VectorXd d;
  Eigen::VectorXd q;
  bool near_critical = false;

  Index size() const { return delta.size(); }
  NareCoefficients coefficients() const;
};

/// Balanced system  X~C~X~ - X~E~ - A~X~ + B~ = 0  with X~ = Phi X Phi,
/// Phi = diag(sqrt(q)).  A~ = Delta - phi phi^T, B~ = C~ = phi phi^T,
/// E~ = D - phi phi^T.
struct BalancedInstance {
  Eigen::VectorXd delta;
  Eigen::VectorXd d;
  Eigen::VectorXd phi;
  bool near_critical = false;

  Index size() const { return delta.size(); }
  NareCoefficients coefficients() const;
};

/// delta_i = 1/(c w_i (1+alpha)), d_i = 1/(c w_i (1-alpha)), q_i = c_i/(2 w_i).
NareInstance build_instance(const TransportParams& params, const Quadrature& quad);

/// Convenience: Gauss-Legendre instance for the given parameters.
NareInstance build_instance(const TransportParams& params);

BalancedInstance balance(const NareInstance& inst);

/// X = Phi^{-1} X~ Phi^{-1}: rows of both factors divided by phi.
/// The factors of the result are no longer orthonormal in general.
LowRankBilinear unbalance_solution(const LowRankBilinear& balanced,
                                   const Eigen::VectorXd& phi);

/// Dense A, B, C, E for oracles and tests.
struct DenseCoefficients {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd E;
};

DenseCoefficients assemble_dense(const NareCoefficients& coefs,
                                 Index cap = kDefaultDenseCap);
inline DenseCoefficients assemble_dense(const NareInstance& inst,
                                        Index cap = kDefaultDenseCap) {
  return assemble_dense(inst.coefficients(), cap);
}
inline DenseCoefficients assemble_dense(const BalancedInstance& inst,
                                        Index cap = kDefaultDenseCap) {
  return assemble_dense(inst.coefficients(), cap);
}

// Instance text format, version 1:
//
//   tnare-instance 1
//   n <n>
//   c <c>
//   alpha <alpha>
//   <omega_1> <weight_1>
//   ...
//   <omega_n> <weight_n>
//
// Values are written with 17 significant digits. Lines starting with '#'
// are ignored by the reader.

struct InstanceFile {
  TransportParams params;
  Quadrature quad;
};

void write_instance(std::ostream& os, const TransportParams& params, const Quadrature& quad);
InstanceFile read_instance(std::istream& is);
void write_instance_file(const std::string& path, const TransportParams& params,
                         const Quadrature& quad);
InstanceFile read_instance_file(const std::string& path);

}  // namespace tnare
