#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "tnare/low_rank.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare::testing {

inline const double kScalarRoot = 3.0 - 2.0 * std::sqrt(2.0);

// n = 1, c = 0.5, alpha = 0, omega = 0.5: A = E = 3, B = C = 1.
inline NareInstance scalar_instance() {
  return build_instance(TransportParams{0.5, 0.0, 1});
}

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline Eigen::MatrixXd orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

inline LowRankBilinear random_low_rank(Index n, Index r, std::mt19937_64& rng) {
  Eigen::VectorXd core(r);
  for (Index i = 0; i < r; ++i) core(i) = std::pow(0.5, static_cast<double>(i));
  return {orthonormal(n, r, rng), core, orthonormal(n, r, rng)};
}

inline double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace tnare::testing
