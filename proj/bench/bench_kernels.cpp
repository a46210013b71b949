// Serial reference path against the OpenMP path for the data-parallel kernels.
// The second argument of each benchmark selects the path: 0 serial, 1 parallel.
// LOOP_LC_THREADS caps the worker count.

#include <benchmark/benchmark.h>

#include <random>

#include "loop_lc/dcopf.hpp"
#include "loop_lc/interior.hpp"
#include "loop_lc/train.hpp"

using namespace loop_lc;

namespace {

struct Setup {
  LinConProblem problem;
  ReducedProblem red;
  std::vector<Vec> xs;
  std::vector<Vec> u_os;
  std::vector<TrainingSample> data;
  MlpModel model;

  Setup(Index gens, Index samples) {
    const DcopfSystem s = generate_system(gens, 2 * gens, gens, 1);
    problem = to_lincon(s);
    red = reduce(problem);
    const DcopfDataset ds = sample_dataset(s, red, samples, 0.1, 2);
    xs = ds.samples;
    for (const Vec& x : xs) {
      u_os.push_back(find_interior_artificial(red, x).point);
      data.push_back({x, solve_reference(red, x)});
    }
    model = make_loop_model(red, 3, {64, 64});
  }
};

const Setup& setup(Index gens) {
  static const Setup small(4, 256);
  static const Setup large(12, 256);
  return gens <= 4 ? small : large;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void BM_BatchForward(benchmark::State& state) {
  const Setup& s = setup(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(batch_pipeline_forward(s.model, s.red, s.xs, s.u_os, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.xs.size()));
}

void BM_BatchGradient(benchmark::State& state) {
  const Setup& s = setup(state.range(0));
  std::vector<Index> batch(s.data.size());
  for (size_t i = 0; i < batch.size(); ++i) batch[i] = static_cast<Index>(i);
  const SampleGradientFn fn = [&](Index i, const MlpModel& m, MlpParameters& g) {
    return loop_sample_loss(m, s.red, s.data[static_cast<size_t>(i)], s.u_os[static_cast<size_t>(i)],
                            TrainingMode::solver_in_loop, &g);
  };
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_batch_gradient(s.model, batch, fn, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch.size()));
}

void BM_BasicFeasiblePoints(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Index n = 4, m = state.range(0);
  Mat a(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = unif(rng);
  for (Index i = 0; i < m; ++i) a.row(i) /= a.row(i).norm();
  const LinConProblem p = make_problem(Mat::Zero(0, n), Mat::Zero(0, 1), Vec::Zero(0), a, Mat::Zero(m, 1),
                                       Vec::Constant(m, -1.0), Objective::builtin("sum_squares"));
  const BfsIndexSets structures = build_bfs_structures(reduce(p), 1'000'000);
  const Vec x = Vec::Zero(1);
  for (auto _ : state) benchmark::DoNotOptimize(basic_feasible_points(structures, x, exec_of(state)));
  state.counters["index_sets"] = static_cast<double>(structures.bases.size());
}

}  // namespace

BENCHMARK(BM_BatchForward)->ArgsProduct({{4, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)->ArgsProduct({{4, 12}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BasicFeasiblePoints)->ArgsProduct({{12, 16}, {0, 1}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
