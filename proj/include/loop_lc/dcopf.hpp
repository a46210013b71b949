#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "loop_lc/baselines.hpp"
#include "loop_lc/problem_io.hpp"

namespace loop_lc {

/// Synthetic DC optimal power flow system in per unit (100 MVA base).
/// Generator g costs a_g P^2 + b_g P; line flows are ptdf_gen P_G - ptdf_load P_D.
struct DcopfSystem {
  Index n_gen = 0;
  Index n_load = 0;
  Index n_line = 0;
  Index n_bus = 0;
  Vec cost_a;
  Vec cost_b;
  Vec p_min;
  Vec p_max;
  Mat ptdf_gen;   // n_line x n_gen
  Mat ptdf_load;  // n_line x n_load
  Vec line_limits;
  Vec base_load;
  IndexList gen_bus;
  IndexList load_bus;
  std::vector<std::pair<Index, Index>> lines;
  Vec susceptance;
};

/// Chain of n_line + 1 buses, or (n_line >= 3, chosen by the seed) a ring of
/// n_line buses. Bus 0 is the slack bus of the PTDF. Deterministic per seed.
/// Needs at least two generators so the balance equality leaves a free variable.
DcopfSystem generate_system(Index n_gen, Index n_load, Index n_line, std::uint64_t seed);

/// Rows: P_G <= p_max, -P_G <= -p_min, forward line limits, reverse line
/// limits. One balance equality 1'P_G - 1'P_D = 0. x is the load vector.
LinConProblem to_lincon(const DcopfSystem& system);

json system_to_json(const DcopfSystem& system);
DcopfSystem system_from_json(const json& j);

struct DcopfDataset {
  Vec base_load;
  std::vector<Vec> samples;
  IndexList train_idx;
  IndexList test_idx;
};

inline constexpr int kResampleCap = 100;

/// Loads uniform in [1 - fluctuation, 1 + fluctuation] * base_load,
/// componentwise; samples whose polytope has no interior are redrawn (up to
/// 100 times each). Split 1:1 after a seeded shuffle.
DcopfDataset sample_dataset(const DcopfSystem& system, const ReducedProblem& red, Index n_samples,
                            double fluctuation, std::uint64_t seed);

struct BenchmarkConfig {
  std::vector<std::string> methods{"loop", "penalty", "projection", "dc3"};
  TrainConfig loop_train;
  TrainConfig baseline_train;
  BaselineConfig baseline;
  std::vector<Index> hidden{16};
  /// Zero the timing columns so the CSV is byte-identical across runs.
  bool deterministic = false;
};

/// Settings used by `bench dcopf`: LOOP trains solver-in-loop with lr 1e-2 and
/// batch 16; baselines train objective-only with lr 1e-4 and a gradient clip of 10.
BenchmarkConfig default_benchmark_config(std::uint64_t seed, int loop_epochs = 200, int baseline_epochs = 200);

struct MethodReport {
  std::string method;
  MetricsReport metrics;
  double train_seconds = 0.0;
  std::string status = "ok";
  std::vector<double> instance_optimality_gap;
  std::vector<double> instance_feasibility_gap;
};

struct BenchmarkResult {
  std::vector<MethodReport> rows;
};

/// Trains each method on the train half and evaluates it on the test half
/// against QP reference optima. A failing method becomes a row whose status
/// carries the error. Inference is timed per instance on one thread; LOOP's
/// interior points are computed beforehand and are not part of its time.
BenchmarkResult run_benchmark(const DcopfSystem& system, const DcopfDataset& dataset, const BenchmarkConfig& cfg);

/// method,optimality_gap,feasibility_gap,mean_inference_ms,train_seconds,status
void write_csv(std::ostream& out, const BenchmarkResult& result, bool deterministic);

/// method,instance,optimality_gap,feasibility_gap
void write_plot_data(std::ostream& out, const BenchmarkResult& result);

}  // namespace loop_lc
