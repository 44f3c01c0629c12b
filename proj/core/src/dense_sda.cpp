#include "tnare/dense_sda.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "tnare/errors.hpp"
#include "tnare/structured_linalg.hpp"

namespace tnare {

namespace {

// LU of m; throws NearCriticalError if m is numerically singular.
Eigen::PartialPivLU<Eigen::MatrixXd> checked_lu(const Eigen::MatrixXd& m, const char* what) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double scale = m.cwiseAbs().maxCoeff();
  if (piv.size() > 0 && !(piv.minCoeff() > 1e-14 * std::max(scale, 1.0))) {
    throw NearCriticalError(std::string("dense SDA: ") + what + " is numerically singular");
  }
  return lu;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DenseSdaState dense_sda_init(const DenseCoefficients& m, double gamma) {
  const Index n = m.A.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const auto e_shift = checked_lu(m.E + gamma * eye, "E + gamma I");
  const auto a_shift = checked_lu(m.A + gamma * eye, "A + gamma I");
  const Eigen::MatrixXd w = m.A + gamma * eye - m.B * e_shift.solve(m.C);
  const Eigen::MatrixXd v = m.E + gamma * eye - m.C * a_shift.solve(m.B);
  const auto w_lu = checked_lu(w, "W");
  const auto v_lu = checked_lu(v, "V");
  const Eigen::MatrixXd w_inv = w_lu.inverse();
  const Eigen::MatrixXd e_shift_inv = e_shift.inverse();

  DenseSdaState s;
  s.gamma = gamma;
  s.e = eye - 2.0 * gamma * v_lu.inverse();
  s.f = eye - 2.0 * gamma * w_inv;
  s.g = 2.0 * gamma * e_shift_inv * m.C * w_inv;
  s.h = 2.0 * gamma * w_inv * m.B * e_shift_inv;
  s.k = 0;
  return s;
}

void dense_sda_step(DenseSdaState& s) {
  const Index n = s.e.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const auto gh = checked_lu(eye - s.g * s.h, "I - G_k H_k");
  const auto hg = checked_lu(eye - s.h * s.g, "I - H_k G_k");
  const Eigen::MatrixXd gh_e = gh.solve(s.e);      // (I - GH)^{-1} E
  const Eigen::MatrixXd gh_gf = gh.solve(s.g * s.f);
  const Eigen::MatrixXd hg_f = hg.solve(s.f);
  const Eigen::MatrixXd hg_he = hg.solve(s.h * s.e);

  Eigen::MatrixXd e_next = s.e * gh_e;
  Eigen::MatrixXd f_next = s.f * hg_f;
  Eigen::MatrixXd g_next = s.g + s.e * gh_gf;
  Eigen::MatrixXd h_next = s.h + s.f * hg_he;
  s.e = std::move(e_next);
  s.f = std::move(f_next);
  s.g = std::move(g_next);
  s.h = std::move(h_next);
  ++s.k;
}

double dense_dual_residual(const DenseCoefficients& m, const Eigen::MatrixXd& y) {
  return (y * m.B * y - y * m.A - m.E * y + m.C).norm() / m.C.norm();
}

DenseSolution dense_sda_solve(const NareCoefficients& coefs, const SolverConfig& config,
                              bool keep_history) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const DenseCoefficients m = assemble_dense(coefs);
  const double b_norm = coefs.b_norm();

  DenseSolution out;
  SolveReport& report = out.report;
  report.algorithm = "dense-sda";
  report.gamma = gamma_select(coefs);

  auto residual = [&](const Eigen::MatrixXd& h) { return dense_residual_norm(m, h) / b_norm; };

  DenseSdaState s;
  try {
    s = dense_sda_init(m, report.gamma);
  } catch (const NearCriticalError& e) {
    report.termination = Termination::near_critical_failure;
    report.warnings.emplace_back(e.what());
    report.total_seconds = seconds_since(t0);
    return out;
  }
  if (keep_history) out.h_history.push_back(s.h);
  report.initial_residual = residual(s.h);
  report.initial_rank_h = report.initial_rank_g = static_cast<int>(coefs.size());

  double res = report.initial_residual;
  double prev_core = std::numeric_limits<double>::quiet_NaN();
  auto met = [&](double r, double core_change) {
    return config.stopping == StoppingRule::normalized_residual ? r <= config.tol_residual
                                                                : core_change <= config.tol_residual;
  };
  report.termination = Termination::max_iterations;
  if (met(res, std::numeric_limits<double>::infinity())) report.termination = Termination::converged;

  while (report.termination != Termination::converged && s.k < config.max_iter) {
    const auto ts = std::chrono::steady_clock::now();
    try {
      dense_sda_step(s);
    } catch (const NearCriticalError& e) {
      report.termination = Termination::near_critical_failure;
      report.warnings.emplace_back(e.what());
      break;
    }
    IterationRecord rec;
    rec.k = s.k - 1;
    rec.wall_seconds = seconds_since(ts);
    rec.rank_h = rec.rank_g = static_cast<int>(coefs.size());
    rec.e_norm = s.e.norm();
    rec.f_norm = s.f.norm();
    const bool check = (s.k % config.residual_cadence) == 0;
    double change = std::numeric_limits<double>::infinity();
    const double prev_res = res;
    if (check || config.stopping == StoppingRule::core_change) {
      rec.residual = residual(s.h);
      res = rec.residual;
      const double core = s.h.norm();
      if (!std::isnan(prev_core)) change = std::abs(core - prev_core) / core;
      prev_core = core;
    }
    report.iterations.push_back(rec);
    if (keep_history) out.h_history.push_back(s.h);
    if ((check || config.stopping == StoppingRule::core_change) && met(res, change))
      report.termination = Termination::converged;
    else if (rec.residual >= 0.0 && config.stop_on_stagnation &&
             residual_stagnated(prev_res, rec.residual)) {
      report.termination = Termination::stagnated;
      break;
    }
  }

  out.x = s.h;
  out.y = s.g;
  report.final_residual = residual(s.h);
  report.total_seconds = seconds_since(t0);
  return out;
}

DenseSolution dense_sda_solve(const NareInstance& inst, const SolverConfig& config,
                              bool keep_history) {
  DenseSolution out = dense_sda_solve(inst.coefficients(), config, keep_history);
  if (inst.near_critical)
    out.report.warnings.emplace_back("c = 1, alpha = 0: K is singular, convergence may be slow");
  return out;
}

double hausdorff_distance(const std::vector<std::complex<double>>& a,
                          const std::vector<std::complex<double>>& b) {
  auto directed = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

SpectralReport spectral_check(const DenseCoefficients& m) {
  const Index n = m.A.rows();
  if (n > 64) throw InvalidInput("spectral_check is limited to n <= 64");
  Eigen::MatrixXd h(2 * n, 2 * n);
  Eigen::MatrixXd k(2 * n, 2 * n);
  h << m.E, -m.C, m.B, -m.A;
  k << m.E, -m.C, -m.B, m.A;

  SpectralReport out;
  const Eigen::VectorXcd hv = Eigen::EigenSolver<Eigen::MatrixXd>(h, false).eigenvalues();
  const Eigen::VectorXcd kv = Eigen::EigenSolver<Eigen::MatrixXd>(k, false).eigenvalues();
  out.h_eigenvalues.assign(hv.data(), hv.data() + hv.size());
  out.k_eigenvalues.assign(kv.data(), kv.data() + kv.size());
  std::stable_sort(out.h_eigenvalues.begin(), out.h_eigenvalues.end(),
                   [](const auto& x, const auto& y) { return x.real() > y.real(); });
  std::stable_sort(out.k_eigenvalues.begin(), out.k_eigenvalues.end(),
                   [](const auto& x, const auto& y) { return x.real() > y.real(); });

  std::vector<std::complex<double>> predicted;
  predicted.reserve(out.h_eigenvalues.size());
  for (Index i = 0; i < 2 * n; ++i) {
    const auto lam = out.h_eigenvalues[static_cast<std::size_t>(i)];
    predicted.push_back(i < n ? lam : -lam);
  }
  out.match_distance = hausdorff_distance(out.k_eigenvalues, predicted);
  return out;
}

SpectralReport spectral_check(const NareInstance& inst) {
  return spectral_check(assemble_dense(inst));
}

}  // namespace tnare
