#include "tnare/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "tnare/errors.hpp"

namespace tnare {

using nlohmann::json;

namespace {

json flops_json(const FlopSnapshot& s) {
  json kernels = json::object();
  for (int i = 0; i < kKernelCount; ++i)
    kernels[std::string(kernel_label(static_cast<Kernel>(i)))] = s.flops[i];
  return {{"kernels", kernels},
          {"step_flops", s.step_flops()},
          {"base_applications", s.base_applications},
          {"implicit_block_applications", s.implicit_block_applications}};
}

// NaN and infinities have no JSON spelling.
json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

SolutionSummary summarize(const LowRankBilinear& x) {
  SolutionSummary s;
  s.rank = x.rank();
  s.core = x.core;
  if (x.rows() > 0) s.x11 = x.entry(0, 0);
  if (x.rows() > 0 && x.rows() <= kDefaultDenseCap) s.min_entry = x.dense().minCoeff();
  return s;
}

SolutionSummary summarize(const Eigen::MatrixXd& x) {
  SolutionSummary s;
  if (x.size() == 0) return s;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x);
  s.rank = svd.rank();
  s.core = svd.singularValues().head(s.rank);
  s.x11 = x(0, 0);
  s.min_entry = x.minCoeff();
  return s;
}

std::string report_json(const SolveReport& report, const ReportContext& ctx,
                        const SolutionSummary* solution) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["algorithm"] = report.algorithm;
  j["instance"] = {{"n", ctx.params.n},
                   {"c", ctx.params.c},
                   {"alpha", ctx.params.alpha},
                   {"source", ctx.instance_source.empty() ? "parameters" : ctx.instance_source}};
  j["config"] = {{"tol_residual", ctx.config.tol_residual},
                 {"trunc_rel", ctx.config.trunc_rel},
                 {"max_iter", ctx.config.max_iter},
                 {"max_rank", ctx.config.max_rank},
                 {"residual_cadence", ctx.config.residual_cadence}};
  j["gamma"] = report.gamma;
  j["termination"] = std::string(termination_label(report.termination));
  j["converged"] = report.converged();
  j["iterations"] = report.iteration_count();
  j["initial_residual"] = number_or_null(report.initial_residual);
  j["initial_rank"] = {report.initial_rank_h, report.initial_rank_g};
  j["final_residual"] = number_or_null(report.final_residual);
  j["c_gamma"] = report.c_gamma;
  j["total_seconds"] = report.total_seconds;
  j["warnings"] = report.warnings;
  j["init_flops"] = flops_json(report.init_flops);

  json hist = json::array();
  for (const auto& it : report.iterations) {
    json h = {{"k", it.k},
              {"residual", number_or_null(it.residual)},
              {"rank_h", it.rank_h},
              {"rank_g", it.rank_g},
              {"wall_seconds", it.wall_seconds},
              {"flops", flops_json(it.flops)}};
    if (it.e_norm >= 0.0) h["e_norm"] = it.e_norm;
    if (it.f_norm >= 0.0) h["f_norm"] = it.f_norm;
    hist.push_back(std::move(h));
  }
  j["history"] = std::move(hist);
  j["total_step_flops"] = report.total_step_flops();

  if (solution) {
    j["solution"] = {{"rank", solution->rank},
                     {"x11", solution->x11},
                     {"min_entry", solution->min_entry},
                     {"core", std::vector<double>(solution->core.data(),
                                                  solution->core.data() + solution->core.size())}};
  } else {
    j["solution"] = nullptr;
  }
  return j.dump(2);
}

void write_report_json(const std::string& path, const SolveReport& report,
                       const ReportContext& ctx, const SolutionSummary* solution) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open " + path + " for writing");
  os << report_json(report, ctx, solution) << '\n';
  if (!os) throw InvalidInput("failed writing " + path);
}

void write_report_flops_csv(std::ostream& os, const SolveReport& report) {
  std::vector<FlopSnapshot> rows;
  rows.reserve(report.iterations.size() + 1);
  FlopSnapshot init = report.init_flops;
  init.k = -1;
  rows.push_back(init);
  for (const auto& it : report.iterations) rows.push_back(it.flops);
  write_flop_csv(os, rows);
}

BenchRecord make_bench_record(const TransportParams& params, const SolveReport& report) {
  BenchRecord r;
  r.n = params.n;
  r.c = params.c;
  r.alpha = params.alpha;
  r.algorithm = report.algorithm;
  r.termination = std::string(termination_label(report.termination));
  r.iterations = report.iteration_count();
  r.final_residual = report.final_residual;
  r.max_rank = report.max_rank();
  r.total_flops = report.total_step_flops();
  r.wall_seconds = report.total_seconds;
  r.history = report.iterations;
  for (const auto& w : report.warnings) r.error += (r.error.empty() ? "" : "; ") + w;
  return r;
}

void pair_flop_ratios(std::vector<BenchRecord>& records) {
  using Key = std::tuple<Eigen::Index, double, double>;
  std::map<Key, BenchRecord*> original;
  for (auto& r : records)
    if (r.algorithm == "sda-ls") original[{r.n, r.c, r.alpha}] = &r;

  for (auto& r : records) {
    if (r.algorithm != "modified-sda-ls") continue;
    auto found = original.find({r.n, r.c, r.alpha});
    if (found == original.end()) continue;
    BenchRecord& o = *found->second;
    const std::size_t common = std::min(r.history.size(), o.history.size());
    double num = 0.0, den = 0.0;
    r.iteration_ratio.assign(common, -1.0);
    for (std::size_t i = 0; i < common; ++i) {
      const double a = r.history[i].flops.step_flops();
      const double b = o.history[i].flops.step_flops();
      num += a;
      den += b;
      if (b > 0.0) r.iteration_ratio[i] = a / b;
    }
    const double ratio = den > 0.0 ? num / den : -1.0;
    r.flop_ratio = ratio;
    o.flop_ratio = ratio;
    o.iteration_ratio = r.iteration_ratio;
  }
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "n,c,alpha,algorithm,termination,iterations,final_residual,max_rank,total_flops,"
        "wall_seconds,flop_ratio,error\n";
  for (const auto& r : records) {
    os << r.n << ',' << fmt(r.c) << ',' << fmt(r.alpha) << ',' << r.algorithm << ','
       << r.termination << ',' << r.iterations << ',' << fmt(r.final_residual) << ','
       << r.max_rank << ',' << fmt(r.total_flops) << ',' << fmt(r.wall_seconds) << ',';
    if (r.flop_ratio >= 0.0) os << fmt(r.flop_ratio);
    os << ',' << csv_field(r.error) << '\n';
  }
}

void write_bench_iterations_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "n,c,alpha,algorithm,k,step_flops,implicit_block_applications,base_applications,"
        "wall_seconds,rank_h,rank_g,residual,flop_ratio\n";
  for (const auto& r : records) {
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      const IterationRecord& it = r.history[i];
      os << r.n << ',' << fmt(r.c) << ',' << fmt(r.alpha) << ',' << r.algorithm << ',' << it.k
         << ',' << fmt(it.flops.step_flops()) << ',' << it.flops.implicit_block_applications << ','
         << it.flops.base_applications << ',' << fmt(it.wall_seconds) << ',' << it.rank_h << ','
         << it.rank_g << ',' << fmt(it.residual) << ',';
      if (i < r.iteration_ratio.size() && r.iteration_ratio[i] >= 0.0)
        os << fmt(r.iteration_ratio[i]);
      os << '\n';
    }
  }
}

}  // namespace tnare
