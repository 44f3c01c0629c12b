#include "tnare/modified_sda_ls.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "doubling_common.hpp"
#include "tnare/errors.hpp"

namespace tnare {

using detail::dbl;

ModifiedState msda_init(std::shared_ptr<const ShiftedSolver> solver, const Eigen::VectorXd& phi,
                        const SolverConfig& config, FlopModel* flops) {
  using Op = ShiftedSolver::Op;
  const Index n = solver->size();
  if (phi.size() != n) throw InvalidInput("msda_init: phi does not match the solver dimension");
  const double scale = std::sqrt(2.0 * solver->gamma());

  // Q1 = sqrt(2g) W^{-1} phi,  Q2 = sqrt(2g) (E + gI)^{-T} phi,  Sigma = I
  const Eigen::MatrixXd q1 = scale * solver->solve(Op::w, phi);
  const Eigen::MatrixXd q2 = scale * solver->solve(Op::e_shift, phi, true);
  if (flops) flops->add(Kernel::initialization, 2.0 * DiagonalMinusRankOne::kSolveFlopsPerEntry * dbl(n));

  const Eigen::MatrixXd none(n, 0);
  const BasisExtension x1 = extend_basis(none, q1, flops);
  const BasisExtension x2 = extend_basis(none, q2, flops);

  auto [e0, f0] = make_base_operators(solver);
  ModifiedState state{
      detail::compress(x1.q_hat, x2.q_hat, x1.r * x2.r.transpose(), config.trunc_rel, flops),
      ImplicitIterate(std::move(e0)), ImplicitIterate(std::move(f0)), 0};
  detail::check_rank(state.h.rank(), config.max_rank, 0, "H_0");
  return state;
}

void msda_step(ModifiedState& state, const SolverConfig& config, FlopModel* flops) {
  const int k = state.k;
  const Index n = state.h.rows();
  const Index m = state.h.rank();
  detail::check_rank(m, config.max_rank, k, "H_k");

  const Eigen::MatrixXd& q1 = state.h.left;
  const Eigen::MatrixXd& q2 = state.h.right;
  const auto sigma = state.h.core.asDiagonal();

  // SDA_ls with P1 = Q2, P2 = Q1, Gamma = Sigma. The only Gram products left
  // are Q1^T Q1 and Q2^T Q2 (identity up to roundoff), computed as
  // symmetric rank updates.
  Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd g2 = Eigen::MatrixXd::Zero(m, m);
  g1.selfadjointView<Eigen::Lower>().rankUpdate(q1.transpose());
  g2.selfadjointView<Eigen::Lower>().rankUpdate(q2.transpose());
  g1 = g1.selfadjointView<Eigen::Lower>();
  g2 = g2.selfadjointView<Eigen::Lower>();
  if (flops) flops->add(Kernel::core_products, 2.0 * dbl(n) * dbl(m) * dbl(m));

  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd s_g1_s = sigma * g1 * sigma;  // Sigma Q1^T Q1 Sigma
  const Eigen::MatrixXd s_g2_s = sigma * g2 * sigma;  // Sigma Q2^T Q2 Sigma

  // Sigma_check = Sigma + Sigma G2 Sigma (I - G1 Sigma G2 Sigma)^{-1} G1 Sigma
  const auto lu_h = detail::inner_lu(eye - g1 * s_g2_s, k, "I - Q1^T H Q2 Sigma");
  // F1 = F Q1 (I - Sigma G2 Sigma G1)^{-1} Sigma G2 Sigma
  const auto lu_f = detail::inner_lu(eye - s_g2_s * g1, k, "I - Sigma Q2^T G Q1");
  // E1 = E Q2 (I - Sigma G1 Sigma G2)^{-1} Sigma G1 Sigma
  const auto lu_e = detail::inner_lu(eye - s_g1_s * g2, k, "I - Sigma Q1^T H Q2");

  Eigen::MatrixXd sigma_check = Eigen::MatrixXd(sigma);
  Eigen::MatrixXd small_e = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd small_f = Eigen::MatrixXd::Zero(m, m);
  if (m > 0) {
    sigma_check += sigma * g2 * sigma * lu_h.solve(g1 * sigma);
    small_e = lu_e.solve(s_g1_s);
    small_f = lu_f.solve(s_g2_s);
  }

  // E_k = E_k^T and F_k = F_k^T: E P1 = E^T Q2 = E Q2 and F Q1 = F^T P2.
  Eigen::MatrixXd e_q2 = state.e.apply(q2, false, flops);
  Eigen::MatrixXd f_q1 = state.f.apply(q1, false, flops);

  Eigen::MatrixXd e1 = e_q2 * small_e;
  Eigen::MatrixXd f1 = f_q1 * small_f;
  if (flops) flops->add(Kernel::rank_updates, 4.0 * dbl(n) * dbl(m) * dbl(m));

  const BasisExtension x1 = extend_basis(q1, f_q1, flops);
  const BasisExtension x2 = extend_basis(q2, e_q2, flops);
  const Eigen::MatrixXd core = detail::extension_triangle(m, x1) *
                               detail::block_diag(Eigen::MatrixXd(sigma), sigma_check) *
                               detail::extension_triangle(m, x2).transpose();
  LowRankBilinear h_next = detail::compress(detail::hcat(q1, x1.q_hat), detail::hcat(q2, x2.q_hat),
                                            core, config.trunc_rel, flops);
  detail::check_rank(h_next.rank(), config.max_rank, k + 1, "H_{k+1}");

  state.e.push_update(std::move(e1), e_q2);
  state.f.push_update(std::move(f1), f_q1);
  state.h = std::move(h_next);
  state.k = k + 1;
}

LowRankSolution msda_solve(const NareInstance& inst, const SolverConfig& config, FlopModel* flops) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  FlopModel local;
  FlopModel& fm = flops ? *flops : local;

  LowRankSolution out;
  SolveReport& report = out.report;
  report.algorithm = "modified-sda-ls";
  if (inst.near_critical)
    report.warnings.emplace_back("c = 1, alpha = 0: K is singular, convergence may be slow");

  const BalancedInstance binst = balance(inst);
  const NareCoefficients balanced = binst.coefficients();
  const NareCoefficients original = inst.coefficients();
  report.gamma = gamma_select(balanced);

  std::optional<ModifiedState> state;
  try {
    auto solver = std::make_shared<const ShiftedSolver>(balanced, report.gamma);
    state.emplace(msda_init(solver, binst.phi, config, &fm));
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

  bool warned = false;
  detail::DoublingHooks hooks;
  hooks.step = [&](FlopModel* f) { msda_step(*state, config, f); };
  hooks.residual = [&](FlopModel* f) { return residual_norm(balanced, state->h, f).normalized; };
  hooks.confirm = [&] {
    const double r =
        residual_norm(original, unbalance_solution(state->h, binst.phi), &fm).normalized;
    if (r <= config.tol_residual) return true;
    if (!warned) {
      report.warnings.emplace_back("balanced residual met the tolerance before the original one");
      warned = true;
    }
    return false;
  };
  hooks.rank_h = [&] { return static_cast<int>(state->h.rank()); };
  hooks.rank_g = hooks.rank_h;
  hooks.core = [&] { return state->h.core; };
  detail::run_doubling(hooks, config, fm, report);

  out.x = unbalance_solution(state->h, binst.phi);
  report.final_residual = residual_norm(original, out.x).normalized;
  report.c_gamma = fm.c_gamma(dbl(inst.size()));
  report.total_seconds = detail::seconds_since(t0);
  return out;
}

double SymmetryRecord::max_deviation() const {
  return std::max({q1_vs_p2, q2_vs_p1, sigma_vs_gamma, e_symmetry, f_symmetry, h_vs_gt,
                   ep1_vs_etq2, fq1_vs_ftp2, msda_vs_sda});
}

double SymmetryAudit::max_deviation() const {
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, r.max_deviation());
  return worst;
}

namespace {

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

double vector_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  return relative((a - b).norm(), a.norm());
}

double factor_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return relative(sign_aligned_distance(a, b), std::sqrt(dbl(std::max<Index>(a.cols(), 1))));
}

// ||(a - b S) diag(w)||_F / ||diag(w) scale||_F with S the column signs that
// best align b to a; `scale` is a for block products and I for factors.
double weighted_deviation(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                          const Eigen::VectorXd& w, bool relative_to_a) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() != w.size())
    return std::numeric_limits<double>::infinity();
  double num = 0.0, den = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    const double d = std::min((a.col(j) - b.col(j)).squaredNorm(),
                              (a.col(j) + b.col(j)).squaredNorm());
    num += w(j) * w(j) * d;
    den += w(j) * w(j) * (relative_to_a ? a.col(j).squaredNorm() : 1.0);
  }
  return relative(std::sqrt(num), std::sqrt(den));
}

// max |x_i^T (E y_j) - y_j^T (E x_i)| relative to |x_i| |y_j| and the size of E.
double operator_asymmetry(const ImplicitIterate& op, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd ex = op.apply(x);
  const Eigen::MatrixXd ey = op.apply(y);
  const Eigen::MatrixXd diff = x.transpose() * ey - (y.transpose() * ex).transpose();
  double scale = 0.0;
  for (Index j = 0; j < x.cols(); ++j) {
    scale = std::max(scale, ex.col(j).norm() / x.col(j).norm());
    scale = std::max(scale, ey.col(j).norm() / y.col(j).norm());
  }
  double worst = 0.0;
  for (Index i = 0; i < x.cols(); ++i)
    for (Index j = 0; j < y.cols(); ++j)
      worst = std::max(worst, std::abs(diff(i, j)) / (x.col(i).norm() * y.col(j).norm()));
  return relative(worst, scale);
}

}  // namespace

SymmetryAudit audit_symmetry(const BalancedInstance& binst, const SolverConfig& config, int k_max) {
  config.validate();
  const Index n = binst.size();
  if (n > 256) throw InvalidInput("audit_symmetry is limited to n <= 256");
  const NareCoefficients coefs = binst.coefficients();
  const auto solver = std::make_shared<const ShiftedSolver>(coefs, gamma_select(coefs));

  SdaLsState full = sda_ls_init(solver, LowRankFactors::from(coefs), config, nullptr,
                                InitSplit::symmetric);
  ModifiedState reduced = msda_init(solver, binst.phi, config);

  std::mt19937_64 rng(20240917);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd px(n, 4), py(n, 4);
  for (Index i = 0; i < px.size(); ++i) px.data()[i] = normal(rng);
  for (Index i = 0; i < py.size(); ++i) py.data()[i] = normal(rng);

  SymmetryAudit audit;
  for (int k = 0; k <= k_max; ++k) {
    SymmetryRecord rec;
    rec.k = k;
    rec.q1_vs_p2 = weighted_deviation(full.h.left, full.g.right, full.h.core, false);
    rec.q2_vs_p1 = weighted_deviation(full.h.right, full.g.left, full.h.core, false);
    rec.raw_q1_vs_p2 = factor_deviation(full.h.left, full.g.right);
    rec.raw_q2_vs_p1 = factor_deviation(full.h.right, full.g.left);
    rec.sigma_vs_gamma = vector_deviation(full.h.core, full.g.core);
    rec.e_symmetry = operator_asymmetry(full.e, px, py);
    rec.f_symmetry = operator_asymmetry(full.f, px, py);
    rec.h_vs_gt = relative(frobenius_distance(full.h, full.g.transposed()), frobenius_norm(full.h));
    const Eigen::MatrixXd e_p1 = full.e.apply(full.g.left, false);
    const Eigen::MatrixXd et_q2 = full.e.apply(full.h.right, true);
    const Eigen::MatrixXd f_q1 = full.f.apply(full.h.left, false);
    const Eigen::MatrixXd ft_p2 = full.f.apply(full.g.right, true);
    rec.ep1_vs_etq2 = weighted_deviation(e_p1, et_q2, full.h.core, true);
    rec.fq1_vs_ftp2 = weighted_deviation(f_q1, ft_p2, full.h.core, true);
    rec.msda_vs_sda = relative(frobenius_distance(reduced.h, full.h), frobenius_norm(full.h));
    audit.records.push_back(rec);
    if (k == k_max) break;
    sda_ls_step(full, config);
    msda_step(reduced, config);
  }
  return audit;
}

}  // namespace tnare
