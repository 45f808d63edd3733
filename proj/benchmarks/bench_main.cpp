#include "dladmc/lad_admm.hpp"
#include "dladmc/partition.hpp"
#include "dladmc/prox.hpp"
#include "dladmc/refine.hpp"
#include "dladmc/svd.hpp"
#include "dladmc/synthetic.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace dladmc;

struct Problem {
  Eigen::MatrixXd a_star;
  ObservationSet obs;
  std::vector<double> y;
};

Problem make_problem(Index n) {
  SyntheticScenario sc;
  sc.n1 = sc.n2 = n;
  sc.noise.seed = 11;
  Problem p;
  p.a_star = gen_lowrank(n, n, sc.rank, 10);
  p.obs = sample_observations(p.a_star, sc);
  p.y = p.obs.values();
  return p;
}

void BM_FullSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(full_svd(a));
}
BENCHMARK(BM_FullSvd)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

// Low-rank plus small noise, thresholded just above the noise level.
void BM_ThresholdSvd(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXd a = gen_lowrank(n, n, 5, 1) + 0.01 * Eigen::MatrixXd::Random(n, n);
  ThresholdSvd::Options opts;
  opts.backend = state.range(1) ? SvdBackend::truncated : SvdBackend::full;
  ThresholdSvd svd(opts);
  for (auto _ : state) benchmark::DoNotOptimize(svd.above(a, 1.0));
}
BENCHMARK(BM_ThresholdSvd)
    ->ArgsProduct({{200, 400}, {0, 1}})
    ->ArgNames({"n", "truncated"})
    ->Unit(benchmark::kMillisecond);

void BM_AdmmStep(benchmark::State& state) {
  const Problem p = make_problem(state.range(0));
  AdmmConfig cfg;
  cfg.lambda = 0.002;
  LadAdmmProblem problem(p.obs, p.y, cfg);
  ThresholdSvd svd(cfg.svd);
  AdmmState s = AdmmState::zeros(p.obs.rows(), p.obs.cols(), p.obs.size(), cfg.rho);
  for (auto _ : state) {
    problem.step(s, svd);
    benchmark::DoNotOptimize(s.Z.data());
  }
}
BENCHMARK(BM_AdmmStep)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_QuadraticFit(benchmark::State& state) {
  const Problem p = make_problem(state.range(0));
  QuadSolverConfig cfg;
  cfg.lambda = 0.002;
  cfg.max_iters = 50;
  for (auto _ : state) benchmark::DoNotOptimize(fit_quadratic_nuclear(p.obs, p.y, cfg));
}
BENCHMARK(BM_QuadraticFit)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Bladmc(benchmark::State& state) {
  const Problem p = make_problem(200);
  const Partition part = make_partition(200, 200, 100, 100);
  AdmmConfig cfg;
  cfg.max_iters = 100;
  BlockedFitOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_bladmc(p.obs, p.y, part, std::vector<double>(4, 0.004), cfg, opts));
}
BENCHMARK(BM_Bladmc)->Arg(1)->Arg(4)->ArgName("threads")->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EstimateF0(benchmark::State& state) {
  const Problem p = make_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_f0(p.obs, p.y, p.a_star, 0.07));
}
BENCHMARK(BM_EstimateF0)->Arg(200)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
