#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tnare/flop_model.hpp"

namespace tnare {

enum class StoppingRule {
  normalized_residual,  // ||R||_F / ||B||_F <= tol_residual
  core_change,          // relative change of the core diagonal <= tol_residual
};

struct SolverConfig {
  double tol_residual = 1e-12;
  /// Singular values below trunc_rel * sigma_max are dropped; exact zeros always are.
  double trunc_rel = 1e-14;
  int max_iter = 50;
  int max_rank = 200;
  /// Evaluate the residual every `residual_cadence` iterations.
  int residual_cadence = 1;
  StoppingRule stopping = StoppingRule::normalized_residual;
  /// Stop early (without convergence) once the residual has entered the
  /// terminal phase and stopped dropping; see residual_stagnated().
  bool stop_on_stagnation = true;

  /// Throws InvalidInput on nonpositive tolerances or limits. trunc_rel = 0
  /// is allowed and disables truncation.
  void validate() const;
};

enum class Termination {
  converged,
  max_iterations,
  rank_overflow,
  near_critical_failure,
  stagnated,  // residual stuck at a roundoff floor above the tolerance
  not_run,
};

std::string_view termination_label(Termination t);

inline constexpr double kStagnationOnset = 1e-8;
inline constexpr double kStagnationGain = 100.0;

/// True when the previous residual was already below kStagnationOnset and
/// the new one is not at least kStagnationGain smaller. A doubling step in
/// its terminal phase squares the error, so from 1e-8 it gains several
/// orders of magnitude unless it sits at the roundoff floor.
bool residual_stagnated(double previous, double current);

/// One doubling step k -> k+1.
struct IterationRecord {
  int k = 0;
  /// Normalized residual of the iterate after the step; negative if skipped
  /// by the residual cadence.
  double residual = -1.0;
  int rank_h = 0;  // m_{k+1}
  int rank_g = 0;  // l_{k+1}; equals rank_h for solvers without a G factor
  double wall_seconds = 0.0;
  FlopSnapshot flops;
  /// Dense oracle only: ||E_{k+1}||_F and ||F_{k+1}||_F.
  double e_norm = -1.0;
  double f_norm = -1.0;
};

struct SolveReport {
  std::string algorithm;
  double gamma = 0.0;
  double initial_residual = -1.0;
  int initial_rank_h = 0;
  int initial_rank_g = 0;
  std::vector<IterationRecord> iterations;
  FlopSnapshot init_flops;
  Termination termination = Termination::not_run;
  /// Normalized residual of the returned X in the original equation.
  double final_residual = -1.0;
  double c_gamma = 0.0;
  double total_seconds = 0.0;
  std::vector<std::string> warnings;

  int iteration_count() const { return static_cast<int>(iterations.size()); }
  bool converged() const { return termination == Termination::converged; }
  std::vector<double> residual_history() const;
  int max_rank() const;
  double total_step_flops() const;
};

}  // namespace tnare
