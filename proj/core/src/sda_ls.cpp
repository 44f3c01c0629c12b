#include "tnare/sda_ls.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "doubling_common.hpp"
#include "tnare/errors.hpp"

namespace tnare {

using detail::dbl;

LowRankFactors LowRankFactors::from(const NareCoefficients& coefs) {
  return {coefs.u, coefs.u, coefs.v, coefs.v};
}

SdaLsState sda_ls_init(std::shared_ptr<const ShiftedSolver> solver, const LowRankFactors& factors,
                       const SolverConfig& config, FlopModel* flops, InitSplit split) {
  using Op = ShiftedSolver::Op;
  const Index n = solver->size();
  const double two_gamma = 2.0 * solver->gamma();
  const double s_left = split == InitSplit::left ? two_gamma : std::sqrt(two_gamma);
  const double s_right = split == InitSplit::left ? 1.0 : std::sqrt(two_gamma);

  // H_0 = Q1 Q2^T = 2g W^{-1} B1 B2^T (E+gI)^{-1},  G_0 = P1 P2^T = 2g (E+gI)^{-1} C1 C2^T W^{-1}
  const Eigen::MatrixXd q1 = s_left * solver->solve(Op::w, factors.b1);
  const Eigen::MatrixXd q2 = s_right * solver->solve(Op::e_shift, factors.b2, true);
  const Eigen::MatrixXd p1 = s_left * solver->solve(Op::e_shift, factors.c1);
  const Eigen::MatrixXd p2 = s_right * solver->solve(Op::w, factors.c2, true);
  if (flops) {
    const double per = DiagonalMinusRankOne::kSolveFlopsPerEntry * dbl(n);
    flops->add(Kernel::initialization,
               per * dbl(2 * factors.b1.cols() + 2 * factors.c1.cols()));
  }

  const Eigen::MatrixXd none(n, 0);
  const BasisExtension eq1 = extend_basis(none, q1, flops);
  const BasisExtension eq2 = extend_basis(none, q2, flops);
  const BasisExtension ep1 = extend_basis(none, p1, flops);
  const BasisExtension ep2 = extend_basis(none, p2, flops);

  auto [e0, f0] = make_base_operators(solver);
  SdaLsState state{
      detail::compress(eq1.q_hat, eq2.q_hat, eq1.r * eq2.r.transpose(), config.trunc_rel, flops),
      detail::compress(ep1.q_hat, ep2.q_hat, ep1.r * ep2.r.transpose(), config.trunc_rel, flops),
      ImplicitIterate(std::move(e0)), ImplicitIterate(std::move(f0)), 0};
  detail::check_rank(state.h.rank(), config.max_rank, 0, "H_0");
  detail::check_rank(state.g.rank(), config.max_rank, 0, "G_0");
  return state;
}

void sda_ls_step(SdaLsState& state, const SolverConfig& config, FlopModel* flops,
                 SdaLsStepProducts* products) {
  const int k = state.k;
  const Index n = state.h.rows();
  const Index m = state.h.rank();
  const Index l = state.g.rank();
  detail::check_rank(m, config.max_rank, k, "H_k");
  detail::check_rank(l, config.max_rank, k, "G_k");

  const Eigen::MatrixXd& q1 = state.h.left;
  const Eigen::MatrixXd& q2 = state.h.right;
  const Eigen::MatrixXd& p1 = state.g.left;
  const Eigen::MatrixXd& p2 = state.g.right;
  const auto sigma = state.h.core.asDiagonal();
  const auto gamma = state.g.core.asDiagonal();

  // Cross Gram products: every small matrix below is built from these two.
  const Eigen::MatrixXd q2t_p1 = q2.transpose() * p1;  // m x l
  const Eigen::MatrixXd p2t_q1 = p2.transpose() * q1;  // l x m
  if (flops) flops->add(Kernel::core_products, 4.0 * dbl(n) * dbl(m) * dbl(l));

  const Eigen::MatrixXd sxg = sigma * q2t_p1 * gamma;  // Sigma Q2^T P1 Gamma        (m x l)
  const Eigen::MatrixXd ys = p2t_q1 * sigma;           // P2^T Q1 Sigma              (l x m)
  const Eigen::MatrixXd gys = gamma * ys;              // Gamma P2^T Q1 Sigma        (l x m)
  const Eigen::MatrixXd eye_l = Eigen::MatrixXd::Identity(l, l);
  const Eigen::MatrixXd eye_m = Eigen::MatrixXd::Identity(m, m);

  // I - Gamma P2^T H P1 = I - Gamma Y Sigma X  and  I - P2^T H P1 Gamma = I - Y Sigma X Gamma
  const Eigen::MatrixXd t_g = eye_l - gys * q2t_p1;  // l x l
  const Eigen::MatrixXd t_h = eye_l - ys * q2t_p1 * gamma;  // l x l
  const Eigen::MatrixXd t_f = eye_m - sxg * p2t_q1;  // I - Sigma Q2^T G Q1, m x m
  const auto lu_g = detail::inner_lu(t_g, k, "I - Gamma P2^T H P1");
  const auto lu_h = detail::inner_lu(t_h, k, "I - P2^T H P1 Gamma");
  const auto lu_f = detail::inner_lu(t_f, k, "I - Sigma Q2^T G Q1");

  Eigen::MatrixXd sigma_check = Eigen::MatrixXd(sigma);
  Eigen::MatrixXd gamma_check = Eigen::MatrixXd(gamma);
  Eigen::MatrixXd small_e = Eigen::MatrixXd::Zero(l, m);
  Eigen::MatrixXd small_f = Eigen::MatrixXd::Zero(m, l);
  if (l > 0 && m > 0) {
    sigma_check += sxg * lu_h.solve(ys);
    gamma_check += lu_g.solve(gys * q2t_p1 * gamma);
    small_e = lu_g.solve(gys);
    small_f = lu_f.solve(sxg);
  }

  Eigen::MatrixXd e_p1 = state.e.apply(p1, false, flops);
  Eigen::MatrixXd et_q2 = state.e.apply(q2, true, flops);
  Eigen::MatrixXd f_q1 = state.f.apply(q1, false, flops);
  Eigen::MatrixXd ft_p2 = state.f.apply(p2, true, flops);

  Eigen::MatrixXd e1 = e_p1 * small_e;  // n x m
  Eigen::MatrixXd f1 = f_q1 * small_f;  // n x l
  if (flops) flops->add(Kernel::rank_updates, 4.0 * dbl(n) * dbl(m) * dbl(l));

  // H_{k+1} = [Q1, F Q1] diag(Sigma, Sigma_check) [Q2, E^T Q2]^T
  // G_{k+1} = [P1, E P1] diag(Gamma, Gamma_check) [P2, F^T P2]^T
  const BasisExtension xq1 = extend_basis(q1, f_q1, flops);
  const BasisExtension xq2 = extend_basis(q2, et_q2, flops);
  const BasisExtension xp1 = extend_basis(p1, e_p1, flops);
  const BasisExtension xp2 = extend_basis(p2, ft_p2, flops);

  const Eigen::MatrixXd core_h = detail::extension_triangle(m, xq1) *
                                 detail::block_diag(Eigen::MatrixXd(sigma), sigma_check) *
                                 detail::extension_triangle(m, xq2).transpose();
  const Eigen::MatrixXd core_g = detail::extension_triangle(l, xp1) *
                                 detail::block_diag(Eigen::MatrixXd(gamma), gamma_check) *
                                 detail::extension_triangle(l, xp2).transpose();

  LowRankBilinear h_next = detail::compress(detail::hcat(q1, xq1.q_hat), detail::hcat(q2, xq2.q_hat),
                                            core_h, config.trunc_rel, flops);
  LowRankBilinear g_next = detail::compress(detail::hcat(p1, xp1.q_hat), detail::hcat(p2, xp2.q_hat),
                                            core_g, config.trunc_rel, flops);
  detail::check_rank(h_next.rank(), config.max_rank, k + 1, "H_{k+1}");
  detail::check_rank(g_next.rank(), config.max_rank, k + 1, "G_{k+1}");

  // E_{k+1} = E_k^2 + E1 (E^T Q2)^T,  F_{k+1} = F_k^2 + F1 (F^T P2)^T
  state.e.push_update(std::move(e1), et_q2);
  state.f.push_update(std::move(f1), ft_p2);
  state.h = std::move(h_next);
  state.g = std::move(g_next);
  state.k = k + 1;

  if (products) {
    products->e_p1 = std::move(e_p1);
    products->et_q2 = std::move(et_q2);
    products->f_q1 = std::move(f_q1);
    products->ft_p2 = std::move(ft_p2);
  }
}

LowRankSolution sda_ls_solve(const NareCoefficients& coefs, const SolverConfig& config,
                             FlopModel* flops) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  FlopModel local;
  FlopModel& fm = flops ? *flops : local;

  LowRankSolution out;
  SolveReport& report = out.report;
  report.algorithm = "sda-ls";
  report.gamma = gamma_select(coefs);

  std::shared_ptr<const ShiftedSolver> solver;
  SdaLsState* state_ptr = nullptr;
  std::optional<SdaLsState> state;
  try {
    solver = std::make_shared<const ShiftedSolver>(coefs, report.gamma);
    state.emplace(sda_ls_init(solver, LowRankFactors::from(coefs), config, &fm));
    state_ptr = &*state;
  } catch (const NearCriticalError& e) {
    report.termination = Termination::near_critical_failure;
    report.warnings.emplace_back(e.what());
    report.total_seconds = detail::seconds_since(t0);
    return out;
  } catch (const RankOverflowError& e) {
    report.termination = Termination::rank_overflow;
    report.warnings.emplace_back(e.what());
    report.total_seconds = detail::seconds_since(t0);
    return out;
  }

  double last_residual = -1.0;
  detail::DoublingHooks hooks;
  hooks.step = [&](FlopModel* f) { sda_ls_step(*state_ptr, config, f); };
  hooks.residual = [&](FlopModel* f) {
    last_residual = residual_norm(coefs, state_ptr->h, f).normalized;
    return last_residual;
  };
  hooks.rank_h = [&] { return static_cast<int>(state_ptr->h.rank()); };
  hooks.rank_g = [&] { return static_cast<int>(state_ptr->g.rank()); };
  hooks.core = [&] { return state_ptr->h.core; };
  detail::run_doubling(hooks, config, fm, report);

  out.x = state_ptr->h;
  report.final_residual = residual_norm(coefs, out.x).normalized;
  report.c_gamma = fm.c_gamma(dbl(coefs.size()));
  report.total_seconds = detail::seconds_since(t0);
  return out;
}

LowRankSolution sda_ls_solve(const NareInstance& inst, const SolverConfig& config,
                             FlopModel* flops) {
  LowRankSolution out = sda_ls_solve(inst.coefficients(), config, flops);
  if (inst.near_critical)
    out.report.warnings.emplace_back("c = 1, alpha = 0: K is singular, convergence may be slow");
  return out;
}

}  // namespace tnare
