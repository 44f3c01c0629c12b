#include "doubling_common.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tnare/errors.hpp"

namespace tnare::detail {

LowRankBilinear compress(const Eigen::MatrixXd& basis1, const Eigen::MatrixXd& basis2,
                         const Eigen::MatrixXd& core, double trunc_rel, FlopModel* flops) {
  const TruncatedSvd svd = truncated_svd(core, trunc_rel, flops);
  LowRankBilinear out{basis1 * svd.u, svd.s, basis2 * svd.v};
  if (flops) {
    const double r = dbl(svd.s.size());
    flops->add(Kernel::factor_assembly,
               2.0 * dbl(basis1.rows()) * (dbl(basis1.cols()) + dbl(basis2.cols())) * r);
  }
  return out;
}

Eigen::MatrixXd extension_triangle(Eigen::Index m, const BasisExtension& ext) {
  const Eigen::Index p = ext.r.rows();
  const Eigen::Index q = ext.r.cols();
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + p, m + q);
  t.topLeftCorner(m, m).setIdentity();
  t.topRightCorner(m, q) = ext.s;
  t.bottomRightCorner(p, q) = ext.r;
  return t;
}

Eigen::MatrixXd hcat(const Eigen::MatrixXd& left, const Eigen::MatrixXd& right) {
  Eigen::MatrixXd out(left.rows(), left.cols() + right.cols());
  out << left, right;
  return out;
}

Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Eigen::PartialPivLU<Eigen::MatrixXd> inner_lu(const Eigen::MatrixXd& m, int k, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  if (m.rows() == 0) return lu;
  lu.compute(m);
  const double piv = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (!(piv > 1e-14 * scale)) {
    std::ostringstream msg;
    msg << "iteration " << k << ": inner system " << what << " is numerically singular";
    throw NearCriticalError(msg.str());
  }
  return lu;
}

void check_rank(Eigen::Index rank, int max_rank, int k, const char* which) {
  if (rank > max_rank) {
    std::ostringstream msg;
    msg << "iteration " << k << ": rank of " << which << " is " << rank << ", above max_rank "
        << max_rank;
    throw RankOverflowError(msg.str());
  }
}

namespace {

double core_change(const Eigen::VectorXd& prev, const Eigen::VectorXd& cur) {
  const Eigen::Index n = std::max(prev.size(), cur.size());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  a.head(prev.size()) = prev;
  b.head(cur.size()) = cur;
  const double denom = b.norm();
  return denom > 0.0 ? (a - b).norm() / denom : (a - b).norm();
}

}  // namespace

void run_doubling(const DoublingHooks& hooks, const SolverConfig& config, FlopModel& flops,
                  SolveReport& report) {
  const bool by_residual = config.stopping == StoppingRule::normalized_residual;
  auto satisfied = [&](double value) {
    if (!(value <= config.tol_residual)) return false;
    return !hooks.confirm || hooks.confirm();
  };

  report.initial_residual = hooks.residual(&flops);
  report.initial_rank_h = hooks.rank_h();
  report.initial_rank_g = hooks.rank_g();
  report.init_flops = flops.close_initialization();
  report.termination = Termination::max_iterations;
  if (by_residual && satisfied(report.initial_residual)) {
    report.termination = Termination::converged;
    return;
  }

  Eigen::VectorXd prev_core = hooks.core();
  double prev_residual = report.initial_residual;
  for (int k = 0; k < config.max_iter; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.k = k;
    try {
      hooks.step(&flops);
    } catch (const RankOverflowError& e) {
      report.termination = Termination::rank_overflow;
      report.warnings.emplace_back(e.what());
      flops.snapshot(k);
      return;
    } catch (const NearCriticalError& e) {
      report.termination = Termination::near_critical_failure;
      report.warnings.emplace_back(e.what());
      flops.snapshot(k);
      return;
    }
    rec.wall_seconds = seconds_since(t0);
    rec.rank_h = hooks.rank_h();
    rec.rank_g = hooks.rank_g();

    bool stop = false;
    if (by_residual) {
      if ((k + 1) % config.residual_cadence == 0 || k + 1 == config.max_iter) {
        rec.residual = hooks.residual(&flops);
        stop = satisfied(rec.residual);
      }
    } else {
      const Eigen::VectorXd core = hooks.core();
      stop = satisfied(core_change(prev_core, core));
      prev_core = core;
      if ((k + 1) % config.residual_cadence == 0) rec.residual = hooks.residual(&flops);
    }
    rec.flops = flops.snapshot(k);
    report.iterations.push_back(rec);
    if (stop) {
      report.termination = Termination::converged;
      return;
    }
    if (rec.residual >= 0.0) {
      if (config.stop_on_stagnation && residual_stagnated(prev_residual, rec.residual)) {
        report.termination = Termination::stagnated;
        return;
      }
      prev_residual = rec.residual;
    }
  }
}

}  // namespace tnare::detail
