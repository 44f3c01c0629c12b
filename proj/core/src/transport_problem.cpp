#include "tnare/transport_problem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tnare/errors.hpp"

namespace tnare {

void TransportParams::validate() const {
  if (!(c > 0.0 && c <= 1.0)) {
    std::ostringstream msg;
    msg << "c must satisfy 0 < c <= 1, got " << c;
    throw InvalidInput(msg.str());
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    std::ostringstream msg;
    msg << "alpha must satisfy 0 <= alpha < 1, got " << alpha;
    throw InvalidInput(msg.str());
  }
  if (n < 1) throw InvalidInput("n must be at least 1");
}

void Quadrature::validate() const {
  const Index n = omega.size();
  if (n < 1) throw InvalidInput("quadrature is empty");
  if (weights.size() != n) throw InvalidInput("quadrature nodes and weights differ in length");
  for (Index i = 0; i < n; ++i) {
    if (!(omega[i] > 0.0 && omega[i] < 1.0))
      throw InvalidInput("quadrature node " + std::to_string(i) + " outside (0, 1)");
    if (i > 0 && !(omega[i] < omega[i - 1]))
      throw InvalidInput("quadrature nodes must be strictly decreasing");
    if (!(weights[i] > 0.0))
      throw InvalidInput("quadrature weight " + std::to_string(i) + " is not positive");
  }
  long double sum = 0.0L;
  for (Index i = 0; i < n; ++i) sum += weights[i];
  if (std::abs(static_cast<double>(sum - 1.0L)) > 1e-14) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "quadrature weights sum to " << static_cast<double>(sum) << ", expected 1";
    throw InvalidInput(msg.str());
  }
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(Index n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (Index j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
    p0 = p1;
    p1 = p2;
  }
  // (1 - x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x))
  const double dp = static_cast<double>(n) * (p0 - x * p1) / (1.0 - x * x);
  return {p1, dp};
}

}  // namespace

Quadrature gauss_legendre(Index n) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  Quadrature quad;
  quad.omega.resize(n);
  quad.weights.resize(n);
  if (n == 1) {
    quad.omega[0] = 0.5;
    quad.weights[0] = 1.0;
    return quad;
  }

  // Newton in the angle: x = cos(theta) has roots with theta in (0, pi).
  // The mapped node (1 + x)/2 = cos^2(theta/2) keeps full relative accuracy
  // near 0, where 1 + x would cancel.
  const Index half = (n + 1) / 2;
  for (Index i = 0; i < half; ++i) {
    double theta = std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5);
    // Quadratic convergence: once the step is below 1e-10 relative, one
    // more step lands at roundoff. A fixed tolerance near eps may never trigger.
    bool close = false;
    for (int it = 0; it < 100; ++it) {
      const double x = std::cos(theta);
      const auto [p, dp] = legendre(n, x);
      // d/dtheta P_n(cos theta) = -sin(theta) P_n'(cos theta)
      const double step = p / (std::sin(theta) * dp);
      theta += step;
      if (close) break;
      close = std::abs(step) <= 1e-10 * theta;
    }
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    const auto [p, dp] = legendre(n, x);
    (void)p;
    // Weight on (-1, 1) is 2 / ((1 - x^2) P'(x)^2); halve it for (0, 1).
    const double w = 1.0 / (s * s * dp * dp);
    const double hi = std::cos(0.5 * theta);
    const double lo = std::sin(0.5 * theta);
    quad.omega[i] = hi * hi;
    quad.weights[i] = w;
    quad.omega[n - 1 - i] = lo * lo;
    quad.weights[n - 1 - i] = w;
  }
  // Remove the last few ulps of drift so the weights sum to one.
  long double sum = 0.0L;
  for (Index i = 0; i < n; ++i) sum += quad.weights[i];
  quad.weights /= static_cast<double>(sum);
  return quad;
}

NareCoefficients NareInstance::coefficients() const {
  return {delta, d, Eigen::VectorXd::Ones(size()), q};
}

NareCoefficients BalancedInstance::coefficients() const { return {delta, d, phi, phi}; }

NareInstance build_instance(const TransportParams& params, const Quadrature& quad) {
  params.validate();
  quad.validate();
  if (quad.size() != params.n) {
    throw InvalidInput("quadrature has " + std::to_string(quad.size()) +
                       " nodes but n = " + std::to_string(params.n));
  }
  NareInstance inst;
  inst.params = params;
  inst.near_critical = params.near_critical();
  const Eigen::ArrayXd w = quad.omega.array();
  inst.delta = (1.0 / (params.c * w * (1.0 + params.alpha))).matrix();
  inst.d = (1.0 / (params.c * w * (1.0 - params.alpha))).matrix();
  inst.q = (quad.weights.array() / (2.0 * w)).matrix();
  return inst;
}

NareInstance build_instance(const TransportParams& params) {
  params.validate();
  return build_instance(params, gauss_legendre(params.n));
}

BalancedInstance balance(const NareInstance& inst) {
  if ((inst.q.array() <= 0.0).any()) throw InvalidInput("balance requires q > 0");
  return {inst.delta, inst.d, inst.q.array().sqrt().matrix(), inst.near_critical};
}

LowRankBilinear unbalance_solution(const LowRankBilinear& balanced, const Eigen::VectorXd& phi) {
  if (balanced.left.rows() != phi.size() || balanced.right.rows() != phi.size())
    throw InvalidInput("unbalance_solution: factor rows do not match phi");
  const Eigen::VectorXd inv = phi.cwiseInverse();
  return {inv.asDiagonal() * balanced.left, balanced.core, inv.asDiagonal() * balanced.right};
}

DenseCoefficients assemble_dense(const NareCoefficients& coefs, Index cap) {
  const Index n = coefs.size();
  if (n > cap) {
    throw InvalidInput("dense assembly refused: n = " + std::to_string(n) + " exceeds cap " +
                       std::to_string(cap));
  }
  DenseCoefficients m;
  m.A = Eigen::MatrixXd(coefs.delta.asDiagonal()) - coefs.u * coefs.v.transpose();
  m.B = coefs.u * coefs.u.transpose();
  m.C = coefs.v * coefs.v.transpose();
  m.E = Eigen::MatrixXd(coefs.d.asDiagonal()) - coefs.v * coefs.u.transpose();
  return m;
}

}  // namespace tnare
