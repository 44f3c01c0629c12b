#include "tnare/solver_config.hpp"

#include <algorithm>

#include "tnare/errors.hpp"

namespace tnare {

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0)) throw InvalidInput("tol_residual must be positive");
  if (!(trunc_rel >= 0.0 && trunc_rel < 1.0)) throw InvalidInput("trunc_rel must lie in [0, 1)");
  if (max_iter < 1) throw InvalidInput("max_iter must be at least 1");
  if (max_rank < 1) throw InvalidInput("max_rank must be at least 1");
  if (residual_cadence < 1) throw InvalidInput("residual_cadence must be at least 1");
}

bool residual_stagnated(double previous, double current) {
  if (!(previous > 0.0) || !(current > 0.0)) return false;
  return previous <= kStagnationOnset && current * kStagnationGain > previous;
}

std::string_view termination_label(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::rank_overflow: return "rank_overflow";
    case Termination::near_critical_failure: return "near_critical_failure";
    case Termination::stagnated: return "stagnated";
    case Termination::not_run: return "not_run";
  }
  return "unknown";
}

std::vector<double> SolveReport::residual_history() const {
  std::vector<double> out;
  out.reserve(iterations.size());
  for (const auto& it : iterations) out.push_back(it.residual);
  return out;
}

int SolveReport::max_rank() const {
  int r = std::max(initial_rank_h, initial_rank_g);
  for (const auto& it : iterations) r = std::max({r, it.rank_h, it.rank_g});
  return r;
}

double SolveReport::total_step_flops() const {
  double total = 0.0;
  for (const auto& it : iterations) total += it.flops.step_flops();
  return total;
}

}  // namespace tnare
