#include <doctest.h>

#include <cstdlib>
#include <random>

#include "helpers.hpp"
#include "loop_lc/train.hpp"

using namespace loop_lc;
using namespace test_support;

namespace {

struct Fixture {
  LinConProblem problem;
  ReducedProblem red;
  MlpModel model;
  std::vector<Vec> xs;
  std::vector<Vec> u_os;

  explicit Fixture(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    problem = random_problem(rng, 5, 2, 3, 2);
    red = reduce(problem);
    model = make_loop_model(red, seed, {12});
    for (int i = 0; i < 64; ++i) {
      xs.push_back(oracle::random_vec(rng, 2, -0.5, 0.5));
      u_os.push_back(find_interior_artificial(red, xs.back()).point);
    }
  }
};

}  // namespace

TEST_CASE("thread count follows the environment") {
  setenv("LOOP_LC_THREADS", "4", 1);
  CHECK(configure_threads_from_env() == 4);
  CHECK(max_threads() == 4);
  setenv("LOOP_LC_THREADS", "junk", 1);
  CHECK(configure_threads_from_env() == 4);
  unsetenv("LOOP_LC_THREADS");
}

TEST_CASE("batched inference is identical on both paths") {
  setenv("LOOP_LC_THREADS", "4", 1);
  configure_threads_from_env();
  const Fixture f(191);
  const std::vector<Vec> a = batch_pipeline_forward(f.model, f.red, f.xs, f.u_os, Execution::serial);
  const std::vector<Vec> b = batch_pipeline_forward(f.model, f.red, f.xs, f.u_os, Execution::parallel);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] == pipeline_forward(f.model, f.red, f.xs[i], f.u_os[i]).u_full);
  }
}

TEST_CASE("batch gradients are identical on both paths") {
  const Fixture f(193);
  std::vector<Index> batch;
  for (Index i = 63; i >= 0; i -= 2) batch.push_back(i);
  const SampleGradientFn fn = [&](Index i, const MlpModel& m, MlpParameters& g) {
    const TrainingSample s{f.xs[static_cast<size_t>(i)], std::nullopt};
    return loop_sample_loss(m, f.red, s, f.u_os[static_cast<size_t>(i)], TrainingMode::objective_only, &g);
  };
  const BatchGradient a = accumulate_batch_gradient(f.model, batch, fn, Execution::serial);
  const BatchGradient b = accumulate_batch_gradient(f.model, batch, fn, Execution::parallel);
  CHECK(a.loss_sum == b.loss_sum);
  CHECK(flatten(a.grad_sum) == flatten(b.grad_sum));
  CHECK(a.finite);

  // the sum equals an explicit loop in batch order
  double loss = 0.0;
  MlpParameters sum = f.model.zero_like();
  for (Index i : batch) {
    MlpParameters g;
    loss += fn(i, f.model, g);
    sum += g;
  }
  CHECK(loss == a.loss_sum);
  CHECK(flatten(sum) == flatten(a.grad_sum));
}

TEST_CASE("errors inside the parallel region propagate") {
  const Fixture f(197);
  std::vector<Vec> bad_u = f.u_os;
  bad_u[7] = Vec::Constant(bad_u[7].size(), 1e6);
  CHECK_THROWS_AS(batch_pipeline_forward(f.model, f.red, f.xs, bad_u, Execution::parallel), NotInteriorError);
  CHECK_THROWS_AS(batch_pipeline_forward(f.model, f.red, f.xs, bad_u, Execution::serial), NotInteriorError);
  const SampleGradientFn boom = [](Index i, const MlpModel&, MlpParameters&) -> double {
    if (i == 5) throw NumericalError("boom");
    return 0.0;
  };
  std::vector<Index> batch{1, 3, 5, 7};
  CHECK_THROWS_AS(accumulate_batch_gradient(f.model, batch, boom, Execution::parallel), NumericalError);
  unsetenv("LOOP_LC_THREADS");
}
