#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tnare/solver_config.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Default output directory comes from this variable when --out is absent.
inline constexpr const char* kOutDirEnv = "TNARE_OUT_DIR";

enum class Command { generate, solve, verify, bench };
enum class Algorithm { dense_sda, sda_ls, modified_sda_ls };

std::string algorithm_label(Algorithm a);

struct SweepPoint {
  double c = 0.5;
  double alpha = 0.5;
};

struct RunSpec {
  Command command = Command::solve;
  TransportParams params;
  /// Instance file; overrides params when set.
  std::string instance_path;
  Algorithm algorithm = Algorithm::modified_sda_ls;
  SolverConfig config;
  std::string out_dir = ".";
  /// generate: explicit output file (default: <out_dir>/instance-n<n>.txt).
  std::string output_file;
  /// Also run the symmetry audit during solve (balanced instance, n <= 256).
  bool audit = false;
  /// verify: comparison tolerance for solution, iterates and audit.
  double check_tol = 1e-10;
  int audit_steps = 5;
  std::vector<Index> sweep_n{256, 1024, 4096};
  std::vector<SweepPoint> sweep_points{{0.5, 0.5}, {0.9, 0.1}, {0.999, 0.001}};
  int jobs = 1;
};

/// Parses argv and dispatches. Usage errors return kExitUsage.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int cmd_generate(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// "256,1024" -> {256, 1024}; empty string -> {}.
std::vector<Index> parse_n_list(const std::string& text);
/// "0.5:0.5,0.9:0.1" -> {{0.5, 0.5}, {0.9, 0.1}}; empty string -> {}.
std::vector<SweepPoint> parse_point_list(const std::string& text);

}  // namespace tnare::cli
