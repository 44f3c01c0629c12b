#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "tnare/low_rank.hpp"
#include "tnare/solver_config.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

inline constexpr int kReportSchemaVersion = 1;

struct ReportContext {
  TransportParams params;
  SolverConfig config;
  /// Instance file path, or empty for inline parameters.
  std::string instance_source;
};

/// Summary of the returned X kept in the report (the factors are not).
struct SolutionSummary {
  Eigen::Index rank = 0;
  double x11 = 0.0;
  double min_entry = 0.0;  // only filled for n <= kDefaultDenseCap, else 0
  Eigen::VectorXd core;
};

SolutionSummary summarize(const LowRankBilinear& x);
SolutionSummary summarize(const Eigen::MatrixXd& x);

/// Report as pretty-printed JSON. Wall-time fields are the only
/// nondeterministic values.
std::string report_json(const SolveReport& report, const ReportContext& ctx,
                        const SolutionSummary* solution);
void write_report_json(const std::string& path, const SolveReport& report,
                       const ReportContext& ctx, const SolutionSummary* solution);

/// Per-iteration flop CSV of a report (k,kernel,count rows, init as k = -1).
void write_report_flops_csv(std::ostream& os, const SolveReport& report);

/// One (instance, algorithm) cell of a benchmark sweep.
struct BenchRecord {
  Eigen::Index n = 0;
  double c = 0.0;
  double alpha = 0.0;
  std::string algorithm;
  std::string termination;
  int iterations = 0;
  double final_residual = -1.0;
  int max_rank = 0;
  double total_flops = 0.0;
  double wall_seconds = 0.0;
  /// Modified over original step flops on the iterations both runs made;
  /// negative when there is no partner run.
  double flop_ratio = -1.0;
  std::string error;
  std::vector<IterationRecord> history;
  std::vector<double> iteration_ratio;
};

BenchRecord make_bench_record(const TransportParams& params, const SolveReport& report);

/// Fills flop_ratio and iteration_ratio for every sda-ls / modified-sda-ls
/// pair sharing (n, c, alpha).
void pair_flop_ratios(std::vector<BenchRecord>& records);

/// Columns: n,c,alpha,algorithm,termination,iterations,final_residual,
/// max_rank,total_flops,wall_seconds,flop_ratio,error
void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records);
/// Columns: n,c,alpha,algorithm,k,step_flops,implicit_block_applications,
/// base_applications,wall_seconds,rank_h,rank_g,residual,flop_ratio
void write_bench_iterations_csv(std::ostream& os, const std::vector<BenchRecord>& records);

}  // namespace tnare
