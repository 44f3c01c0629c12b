#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "tnare/block_ops.hpp"
#include "tnare/modified_sda_ls.hpp"
#include "tnare/sda_ls.hpp"
#include "tnare/structured_linalg.hpp"
#include "tnare/transport_problem.hpp"

namespace {

using tnare::Index;

Eigen::MatrixXd random_block(Index rows, Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

std::shared_ptr<const tnare::ShiftedSolver> solver_for(Index n) {
  const auto coefs = tnare::build_instance(tnare::TransportParams{0.9, 0.1, n}).coefficients();
  return std::make_shared<const tnare::ShiftedSolver>(coefs, tnare::gamma_select(coefs));
}

void BM_ShiftedSolve(benchmark::State& state) {
  const Index n = state.range(0);
  const auto solver = solver_for(n);
  const Eigen::MatrixXd x = random_block(n, 16, 1);
  for (auto _ : state) {
    Eigen::MatrixXd y = solver->solve(tnare::ShiftedSolver::Op::w, x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ShiftedSolve)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_BaseApply(benchmark::State& state) {
  const Index n = state.range(0);
  auto [e0, f0] = tnare::make_base_operators(solver_for(n));
  const Eigen::MatrixXd x = random_block(n, 16, 2);
  for (auto _ : state) {
    Eigen::MatrixXd y = e0.apply(x, false, nullptr);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_BaseApply)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

// Level-k implicit product with rank-8 updates: 2^k base applications per column.
void BM_ImplicitApply(benchmark::State& state) {
  const Index n = 1024;
  const int level = static_cast<int>(state.range(0));
  auto [e0, f0] = tnare::make_base_operators(solver_for(n));
  tnare::ImplicitIterate e(e0);
  for (int j = 0; j < level; ++j)
    e.push_update(1e-3 * random_block(n, 8, 10 + j), random_block(n, 8, 40 + j));
  const Eigen::MatrixXd x = random_block(n, 8, 3);
  for (auto _ : state) {
    Eigen::MatrixXd y = e.apply(x);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_ImplicitApply)->DenseRange(0, 8, 2);

void BM_ExtendBasis(benchmark::State& state) {
  const Index n = state.range(0);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_block(n, 16, 4));
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, 16);
  const Eigen::MatrixXd y = random_block(n, 16, 5);
  for (auto _ : state) {
    auto ext = tnare::extend_basis(q, y);
    benchmark::DoNotOptimize(ext.q_hat.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_ExtendBasis)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_LowRankResidual(benchmark::State& state) {
  const Index n = state.range(0);
  const auto coefs = tnare::build_instance(tnare::TransportParams{0.9, 0.1, n}).coefficients();
  Eigen::HouseholderQR<Eigen::MatrixXd> ql(random_block(n, 20, 6)), qr(random_block(n, 20, 7));
  tnare::LowRankBilinear x{ql.householderQ() * Eigen::MatrixXd::Identity(n, 20),
                           Eigen::VectorXd::LinSpaced(20, 1.0, 1e-6),
                           qr.householderQ() * Eigen::MatrixXd::Identity(n, 20)};
  for (auto _ : state) benchmark::DoNotOptimize(tnare::residual_norm(coefs, x).absolute);
  state.SetComplexityN(n);
}
BENCHMARK(BM_LowRankResidual)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_SdaLsSteps(benchmark::State& state) {
  const Index n = state.range(0);
  const auto inst = tnare::build_instance(tnare::TransportParams{0.9, 0.1, n});
  tnare::SolverConfig config;
  config.max_iter = 6;
  for (auto _ : state) benchmark::DoNotOptimize(tnare::sda_ls_solve(inst, config).x.rank());
}
BENCHMARK(BM_SdaLsSteps)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ModifiedSteps(benchmark::State& state) {
  const Index n = state.range(0);
  const auto inst = tnare::build_instance(tnare::TransportParams{0.9, 0.1, n});
  tnare::SolverConfig config;
  config.max_iter = 6;
  for (auto _ : state) benchmark::DoNotOptimize(tnare::msda_solve(inst, config).x.rank());
}
BENCHMARK(BM_ModifiedSteps)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
