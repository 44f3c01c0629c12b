#include "tnare/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnare/dense_sda.hpp"
#include "tnare/errors.hpp"
#include "tnare/modified_sda_ls.hpp"
#include "tnare/report_io.hpp"
#include "tnare/sda_ls.hpp"

namespace tnare::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bench cells stop here unless --max-iter is given: each doubling step
// costs twice the previous one.
constexpr int kBenchDefaultMaxIter = 12;
constexpr double kNonnegativitySlack = 1e-12;
constexpr double kSpectralLimit = 1e-8;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidInput(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string instance_tag(Algorithm a, const TransportParams& p) {
  std::ostringstream os;
  os << algorithm_label(a) << "-n" << p.n << "-c" << p.c << "-a" << p.alpha;
  return os.str();
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InvalidInput("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

struct LoadedInstance {
  NareInstance inst;
  TransportParams params;
};

LoadedInstance load(const RunSpec& spec) {
  if (!spec.instance_path.empty()) {
    InstanceFile f = read_instance_file(spec.instance_path);
    return {build_instance(f.params, f.quad), f.params};
  }
  spec.params.validate();
  return {build_instance(spec.params), spec.params};
}

struct SolveOutcome {
  SolveReport report;
  SolutionSummary summary;
  Eigen::MatrixXd dense_x;  // filled for n <= dense cap
};

SolveOutcome run_solver(Algorithm a, const NareInstance& inst, const SolverConfig& config,
                        FlopModel* flops) {
  SolveOutcome out;
  if (a == Algorithm::dense_sda) {
    DenseSolution s = dense_sda_solve(inst, config);
    out.report = std::move(s.report);
    out.summary = summarize(s.x);
    out.dense_x = std::move(s.x);
    if (flops) *flops = FlopModel{};
    return out;
  }
  LowRankSolution s = a == Algorithm::sda_ls ? sda_ls_solve(inst, config, flops)
                                             : msda_solve(inst, config, flops);
  out.report = std::move(s.report);
  out.summary = summarize(s.x);
  if (inst.size() <= kDefaultDenseCap) out.dense_x = s.x.dense();
  return out;
}

json audit_json(const SymmetryAudit& audit) {
  json rows = json::array();
  for (const auto& r : audit.records) {
    rows.push_back({{"k", r.k},
                    {"q1_vs_p2", r.q1_vs_p2},
                    {"q2_vs_p1", r.q2_vs_p1},
                    {"raw_q1_vs_p2", r.raw_q1_vs_p2},
                    {"raw_q2_vs_p1", r.raw_q2_vs_p1},
                    {"sigma_vs_gamma", r.sigma_vs_gamma},
                    {"e_symmetry", r.e_symmetry},
                    {"f_symmetry", r.f_symmetry},
                    {"h_vs_gt", r.h_vs_gt},
                    {"ep1_vs_etq2", r.ep1_vs_etq2},
                    {"fq1_vs_ftp2", r.fq1_vs_ftp2},
                    {"msda_vs_sda", r.msda_vs_sda}});
  }
  return {{"max_deviation", audit.max_deviation()}, {"records", rows}};
}

void add_instance_options(CLI::App* app, RunSpec& spec) {
  app->add_option("--n", spec.params.n, "Number of quadrature nodes");
  app->add_option("--c", spec.params.c, "Average number of particles per collision, 0 < c <= 1");
  app->add_option("--alpha", spec.params.alpha, "Angular shift, 0 <= alpha < 1");
  app->add_option("--instance", spec.instance_path, "Instance file (overrides --n/--c/--alpha)")
      ->check(CLI::ExistingFile);
}

void add_solver_options(CLI::App* app, RunSpec& spec) {
  app->add_option("--tol", spec.config.tol_residual, "Normalized residual tolerance");
  app->add_option("--trunc-rel", spec.config.trunc_rel, "Relative singular value drop threshold");
  app->add_option("--max-iter", spec.config.max_iter, "Maximum doubling steps");
  app->add_option("--max-rank", spec.config.max_rank, "Maximum factor rank");
  app->add_option("--residual-cadence", spec.config.residual_cadence,
                  "Evaluate the residual every k steps");
}

void add_algorithm_option(CLI::App* app, RunSpec& spec) {
  const std::map<std::string, Algorithm> names{{"dense-sda", Algorithm::dense_sda},
                                               {"sda-ls", Algorithm::sda_ls},
                                               {"modified-sda-ls", Algorithm::modified_sda_ls}};
  app->add_option("--algo", spec.algorithm, "dense-sda, sda-ls or modified-sda-ls")
      ->transform(CLI::CheckedTransformer(names, CLI::ignore_case));
}

}  // namespace

std::string algorithm_label(Algorithm a) {
  switch (a) {
    case Algorithm::dense_sda: return "dense-sda";
    case Algorithm::sda_ls: return "sda-ls";
    case Algorithm::modified_sda_ls: return "modified-sda-ls";
  }
  return "unknown";
}

std::vector<Index> parse_n_list(const std::string& text) {
  std::vector<Index> out;
  for (const auto& item : split(text, ',')) {
    const double v = parse_double(item, "n");
    if (v < 1 || v != std::floor(v)) throw InvalidInput("bad n: '" + item + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<SweepPoint> parse_point_list(const std::string& text) {
  std::vector<SweepPoint> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw InvalidInput("sweep point must be c:alpha, got '" + item + "'");
    out.push_back({parse_double(parts[0], "c"), parse_double(parts[1], "alpha")});
  }
  return out;
}

int cmd_generate(const RunSpec& spec, std::ostream& out, std::ostream& /*err*/) {
  spec.params.validate();
  const Quadrature quad = gauss_legendre(spec.params.n);
  fs::path path;
  if (!spec.output_file.empty()) {
    path = spec.output_file;
    if (path.has_parent_path()) ensure_dir(path.parent_path().string());
  } else {
    std::ostringstream name;
    name << "instance-n" << spec.params.n << "-c" << spec.params.c << "-a" << spec.params.alpha
         << ".txt";
    path = ensure_dir(spec.out_dir) / name.str();
  }
  write_instance_file(path.string(), spec.params, quad);
  out << path.string() << '\n';
  return kExitOk;
}

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  spec.config.validate();
  const LoadedInstance li = load(spec);
  if (spec.algorithm == Algorithm::dense_sda && li.inst.size() > kDefaultDenseCap) {
    err << "dense-sda is limited to n <= " << kDefaultDenseCap << " (got n = " << li.inst.size()
        << ")\n";
    return kExitUsage;
  }

  FlopModel flops;
  SolveOutcome r = run_solver(spec.algorithm, li.inst, spec.config, &flops);
  const ReportContext ctx{li.params, spec.config, spec.instance_path};
  json doc = json::parse(report_json(r.report, ctx, &r.summary));
  if (spec.audit) {
    if (li.inst.size() > 256) {
      err << "--audit skipped: limited to n <= 256\n";
    } else {
      doc["symmetry_audit"] = audit_json(audit_symmetry(balance(li.inst), spec.config, spec.audit_steps));
    }
  }

  const fs::path dir = ensure_dir(spec.out_dir);
  const std::string tag = instance_tag(spec.algorithm, li.params);
  const fs::path report_path = dir / ("report-" + tag + ".json");
  {
    std::ofstream os(report_path);
    if (!os) throw InvalidInput("cannot write " + report_path.string());
    os << doc.dump(2) << '\n';
  }
  const fs::path flops_path = dir / ("flops-" + tag + ".csv");
  {
    std::ofstream os(flops_path);
    if (!os) throw InvalidInput("cannot write " + flops_path.string());
    write_report_flops_csv(os, r.report);
  }

  out << algorithm_label(spec.algorithm) << " n=" << li.params.n << " c=" << li.params.c
      << " alpha=" << li.params.alpha << ": " << termination_label(r.report.termination)
      << " after " << r.report.iteration_count() << " iterations, residual "
      << format_number(r.report.final_residual) << ", rank " << r.summary.rank << ", X11 "
      << std::setprecision(10) << r.summary.x11 << '\n';
  out << "report: " << report_path.string() << "\nflops: " << flops_path.string() << '\n';
  for (const auto& w : r.report.warnings) err << "warning: " << w << '\n';
  return r.report.converged() ? kExitOk : kExitFailure;
}

int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  spec.config.validate();
  const LoadedInstance li = load(spec);
  const NareInstance& inst = li.inst;
  const Index n = inst.size();
  if (n > kDefaultDenseCap) {
    err << "verify needs the dense oracle: n must be <= " << kDefaultDenseCap << '\n';
    return kExitUsage;
  }
  const double tol = spec.check_tol;
  const double residual_limit = 10.0 * spec.config.tol_residual;

  struct Check {
    std::string name;
    double value;
    double limit;
    bool gating;
    bool pass;
  };
  std::vector<Check> checks;
  auto at_most = [&](std::string name, double value, double limit, bool gating = true) {
    checks.push_back({std::move(name), value, limit, gating, value <= limit});
  };

  DenseSolution dense = dense_sda_solve(inst, spec.config, true);
  at_most("dense_residual", dense.report.final_residual, residual_limit);

  if (spec.algorithm != Algorithm::dense_sda) {
    SolveOutcome ls = run_solver(spec.algorithm, inst, spec.config, nullptr);
    const double xd_norm = dense.x.norm();
    at_most("solution_difference", (ls.dense_x - dense.x).norm() / xd_norm, tol);
    at_most("residual", ls.report.final_residual, residual_limit);
    checks.push_back({"min_entry", ls.summary.min_entry, -kNonnegativitySlack, true,
                      ls.summary.min_entry >= -kNonnegativitySlack});

    // Iterate-by-iterate comparison against the dense H_k.
    double worst = 0.0;
    const int steps = static_cast<int>(dense.h_history.size());
    const NareCoefficients coefs = inst.coefficients();
    const double gamma = gamma_select(coefs);
    if (spec.algorithm == Algorithm::sda_ls) {
      auto solver = std::make_shared<const ShiftedSolver>(coefs, gamma);
      SdaLsState s = sda_ls_init(solver, LowRankFactors::from(coefs), spec.config);
      for (int k = 0; k < steps; ++k) {
        const Eigen::MatrixXd& hk = dense.h_history[static_cast<std::size_t>(k)];
        worst = std::max(worst, (s.h.dense() - hk).norm() / hk.norm());
        if (k + 1 < steps) sda_ls_step(s, spec.config);
      }
    } else {
      const BalancedInstance b = balance(inst);
      auto solver = std::make_shared<const ShiftedSolver>(b.coefficients(), gamma);
      ModifiedState s = msda_init(solver, b.phi, spec.config);
      for (int k = 0; k < steps; ++k) {
        const Eigen::MatrixXd& hk = dense.h_history[static_cast<std::size_t>(k)];
        worst = std::max(worst, (unbalance_solution(s.h, b.phi).dense() - hk).norm() / hk.norm());
        if (k + 1 < steps) msda_step(s, spec.config);
      }
    }
    at_most("iterate_difference", worst, tol);
  }

  json audit_doc = nullptr;
  if (n <= 256) {
    const SymmetryAudit audit = audit_symmetry(balance(inst), spec.config, spec.audit_steps);
    at_most("symmetry_audit", audit.max_deviation(), tol);
    audit_doc = audit_json(audit);
  }
  double spectral = -1.0;
  if (n <= 64) {
    spectral = spectral_check(inst).match_distance;
    at_most("spectral_distance", spectral, kSpectralLimit, false);
  }

  bool ok = true;
  json items = json::array();
  for (const auto& c : checks) {
    const char* status = c.pass ? "PASS" : (c.gating ? "FAIL" : "INFO");
    if (c.gating && !c.pass) ok = false;
    out << std::left << std::setw(5) << status << ' ' << std::setw(20) << c.name << ' '
        << std::setw(14) << format_number(c.value) << " limit " << format_number(c.limit)
        << (c.gating ? "" : " (not gating)") << '\n';
    items.push_back({{"name", c.name},
                     {"value", c.value},
                     {"limit", c.limit},
                     {"gating", c.gating},
                     {"pass", c.pass}});
  }

  json doc = {{"schema_version", kReportSchemaVersion},
              {"algorithm", algorithm_label(spec.algorithm)},
              {"instance", {{"n", li.params.n}, {"c", li.params.c}, {"alpha", li.params.alpha}}},
              {"check_tol", tol},
              {"dense_iterations", dense.report.iteration_count()},
              {"checks", items},
              {"symmetry_audit", audit_doc},
              {"passed", ok}};
  const fs::path path =
      ensure_dir(spec.out_dir) / ("verify-" + instance_tag(spec.algorithm, li.params) + ".json");
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path.string());
  os << doc.dump(2) << '\n';
  out << (ok ? "verify passed" : "verify FAILED") << "; report: " << path.string() << '\n';
  return ok ? kExitOk : kExitFailure;
}

int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  spec.config.validate();
  struct Cell {
    TransportParams params;
    Algorithm algorithm;
  };
  std::vector<Cell> cells;
  for (Index n : spec.sweep_n)
    for (const auto& p : spec.sweep_points)
      for (Algorithm a : {Algorithm::sda_ls, Algorithm::modified_sda_ls})
        cells.push_back({TransportParams{p.c, p.alpha, n}, a});

  std::vector<BenchRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      BenchRecord rec;
      try {
        cell.params.validate();
        const NareInstance inst = build_instance(cell.params);
        FlopModel flops;
        SolveOutcome r = run_solver(cell.algorithm, inst, spec.config, &flops);
        rec = make_bench_record(cell.params, r.report);
      } catch (const std::exception& e) {
        rec.n = cell.params.n;
        rec.c = cell.params.c;
        rec.alpha = cell.params.alpha;
        rec.algorithm = algorithm_label(cell.algorithm);
        rec.termination = "error";
        rec.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(log_mutex);
        err << rec.algorithm << " n=" << rec.n << " c=" << rec.c << " alpha=" << rec.alpha
            << ": " << rec.termination << ", " << rec.iterations << " iterations, "
            << format_number(rec.wall_seconds) << " s\n";
      }
      records[i] = std::move(rec);
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  pair_flop_ratios(records);

  const fs::path dir = ensure_dir(spec.out_dir);
  const fs::path summary = dir / "bench.csv";
  const fs::path per_iter = dir / "bench_iterations.csv";
  {
    std::ofstream os(summary);
    if (!os) throw InvalidInput("cannot write " + summary.string());
    write_bench_csv(os, records);
  }
  {
    std::ofstream os(per_iter);
    if (!os) throw InvalidInput("cannot write " + per_iter.string());
    write_bench_iterations_csv(os, records);
  }
  out << records.size() << " records\nbench: " << summary.string()
      << "\niterations: " << per_iter.string() << '\n';
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) spec.out_dir = env;

  CLI::App app{"Solvers for the transport-theory nonsymmetric algebraic Riccati equation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto* gen = app.add_subcommand("generate", "Write a Gauss-Legendre instance file");
  add_instance_options(gen, spec);
  gen->add_option("-o,--output", spec.output_file, "Instance file to write");
  gen->add_option("--out", spec.out_dir, "Output directory (default $TNARE_OUT_DIR or .)");

  auto* solve = app.add_subcommand("solve", "Solve one instance and write JSON/CSV reports");
  add_instance_options(solve, spec);
  add_algorithm_option(solve, spec);
  add_solver_options(solve, spec);
  solve->add_option("--out", spec.out_dir, "Output directory (default $TNARE_OUT_DIR or .)");
  solve->add_flag("--audit", spec.audit, "Also record the symmetry audit (n <= 256)");
  solve->add_option("--audit-steps", spec.audit_steps, "Steps covered by the audit");

  auto* verify = app.add_subcommand("verify", "Compare against the dense oracle");
  add_instance_options(verify, spec);
  add_algorithm_option(verify, spec);
  add_solver_options(verify, spec);
  verify->add_option("--out", spec.out_dir, "Output directory (default $TNARE_OUT_DIR or .)");
  verify->add_option("--check-tol", spec.check_tol, "Tolerance for the comparisons");
  verify->add_option("--audit-steps", spec.audit_steps, "Steps covered by the audit");

  std::string sweep_n, sweep_points;
  auto* bench = app.add_subcommand("bench", "Run both large-scale solvers over a sweep");
  add_solver_options(bench, spec);
  bench->add_option("--out", spec.out_dir, "Output directory (default $TNARE_OUT_DIR or .)");
  bench->add_option("--sweep-n", sweep_n, "Comma-separated n values (default 256,1024,4096)");
  bench->add_option("--sweep-params", sweep_points,
                    "Comma-separated c:alpha pairs (default 0.5:0.5,0.9:0.1,0.999:0.001)");
  bench->add_option("--jobs", spec.jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(spec, out, err);
    if (*solve) return cmd_solve(spec, out, err);
    if (*verify) return cmd_verify(spec, out, err);
    spec.command = Command::bench;
    if (bench->count("--sweep-n")) spec.sweep_n = parse_n_list(sweep_n);
    if (bench->count("--sweep-params")) spec.sweep_points = parse_point_list(sweep_points);
    if (!bench->count("--max-iter")) spec.config.max_iter = kBenchDefaultMaxIter;
    return cmd_bench(spec, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace tnare::cli
