// loop_lc command-line front end.
//
// Exit codes: 0 success, 1 domain or I/O error, 2 usage error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "loop_lc/checkpoint.hpp"
#include "loop_lc/dcopf.hpp"
#include "loop_lc/interior.hpp"
#include "loop_lc/parallel.hpp"
#include "loop_lc/problem_io.hpp"
#include "loop_lc/two_phase.hpp"
#include "selftest.hpp"

using namespace loop_lc;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string log_level = "warn";
};

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::vector<Index> parse_hidden(const std::string& spec) {
  std::vector<Index> dims;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const long v = std::stol(item);
    if (v <= 0) throw CLI::ValidationError("--hidden", "layer sizes must be positive");
    dims.push_back(v);
  }
  return dims;
}

// ---- reduce ---------------------------------------------------------------

struct ReduceArgs {
  std::string problem;
  std::string out;
};

int cmd_reduce(const ReduceArgs& a) {
  const ReducedProblem red = reduce(load_problem(a.problem));
  json j{{"a_red", to_json(red.a_red)},
         {"b_mat_red", to_json(red.b_mat_red)},
         {"b_vec_red", to_json(red.b_vec_red)},
         {"indep_idx", red.partition.indep_idx},
         {"dep_idx", red.partition.dep_idx},
         {"dep_from_indep", to_json(red.dep_from_indep)},
         {"dep_from_input", to_json(red.dep_from_input)},
         {"dep_offset", to_json(red.dep_offset)}};
  if (a.out.empty()) {
    emit(j);
  } else {
    save_json(a.out, j);
  }
  return 0;
}

// ---- find-interior --------------------------------------------------------

struct InteriorArgs {
  std::string problem;
  std::string x;
  std::string method = "lp";
  double big_m = kDefaultBigM;
  std::string phase1_model;
  int epochs = 200;
};

json interior_json(const InteriorResult& r) {
  return {{"point", to_json(r.point)}, {"margin", r.margin}, {"method", to_string(r.method)}};
}

int cmd_find_interior(const InteriorArgs& a, const Globals& g) {
  const ReducedProblem red = reduce(load_problem(a.problem));
  const Vec x = load_vector(a.x);
  require_dims(x.size() == red.n_inp(), "x has the wrong length for this problem");
  if (a.method == "lp") {
    emit(interior_json(find_interior_artificial(red, x, a.big_m)));
  } else if (a.method == "bfs") {
    emit(interior_json(find_interior_bfs_average(build_bfs_structures(red), x)));
  } else {
    const Phase1Problem phase1 = make_phase1_problem(red);
    MlpModel model;
    if (!a.phase1_model.empty()) {
      model = load_checkpoint(a.phase1_model).model;
    } else {
      TrainConfig cfg;
      cfg.epochs = a.epochs;
      cfg.seed = g.seed;
      cfg.batch_size = 1;
      cfg.fit_normalization = false;
      spdlog::info("training a Phase-I model for {} epochs", a.epochs);
      model = train_phase1(phase1, {x}, cfg).model;
    }
    try {
      json j = interior_json(find_interior_two_phase(phase1, x, model));
      j["fallback"] = false;
      emit(j);
    } catch (const PredictionMissError& e) {
      spdlog::warn("{}", e.what());
      json j = interior_json(find_interior_artificial(red, x, a.big_m));
      j["fallback"] = true;
      j["predicted_slack"] = e.predicted_slack();
      emit(j);
    }
  }
  return 0;
}

// ---- make-dcopf -----------------------------------------------------------

struct MakeDcopfArgs {
  Index gens = 3, loads = 3, lines = 3, samples = 0;
  double fluctuation = 0.10;
  bool labels = false;
  std::string problem_out;
  std::string data_out;
};

int cmd_make_dcopf(const MakeDcopfArgs& a, const Globals& g) {
  const DcopfSystem sys = generate_system(a.gens, a.loads, a.lines, g.seed);
  const LinConProblem problem = to_lincon(sys);
  if (a.problem_out.empty()) {
    emit(problem_to_json(problem));
  } else {
    save_json(a.problem_out, problem_to_json(problem));
  }
  if (a.samples > 0) {
    if (a.data_out.empty()) throw CLI::ValidationError("--data-out", "required with --samples");
    const ReducedProblem red = reduce(problem);
    const DcopfDataset ds = sample_dataset(sys, red, a.samples, a.fluctuation, g.seed);
    json xs = json::array(), us = json::array();
    for (const Vec& x : ds.samples) {
      xs.push_back(to_json(x));
      if (a.labels) us.push_back(to_json(solve_reference(red, x)));
    }
    json data{{"x", xs}};
    if (a.labels) data["u_star"] = us;
    save_json(a.data_out, data);
  }
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string problem;
  std::string data;
  std::string mode = "solver";
  std::string interior = "lp";
  std::string hidden = "16";
  int epochs = 100;
  Index batch_size = 32;
  double learning_rate = 1e-3;
  double grad_clip = 0.0;
  std::string out;
};

int cmd_train(const TrainArgs& a, const Globals& g) {
  auto problem = std::make_shared<const LinConProblem>(load_problem(a.problem));
  const ReducedProblem red = reduce(problem);
  const json data = load_json(a.data);
  if (!data.contains("x")) throw Error("data file has no \"x\" array");
  std::vector<TrainingSample> samples;
  for (size_t i = 0; i < data.at("x").size(); ++i) {
    TrainingSample s{vec_from_json(data.at("x")[i]), std::nullopt};
    require_dims(s.x.size() == red.n_inp(), "data: x has the wrong length for this problem");
    if (data.contains("u_star")) s.u_star = vec_from_json(data.at("u_star").at(i));
    samples.push_back(std::move(s));
  }
  TrainConfig cfg;
  cfg.mode = training_mode_from_string(a.mode);
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.learning_rate;
  cfg.grad_clip = a.grad_clip;
  cfg.seed = g.seed;
  cfg.interior = a.interior == "shared" ? InteriorStrategy::shared_point : InteriorStrategy::per_sample_lp;

  TrainResult r = train(make_loop_model(red, g.seed, parse_hidden(a.hidden)), red, samples, cfg, {},
                        [](int epoch, double loss) { spdlog::info("epoch {} loss {:.6g}", epoch, loss); });
  Checkpoint ckpt;
  ckpt.model = std::move(r.model);
  ckpt.meta.problem_hash = problem_hash(*problem);
  ckpt.meta.epoch = a.epochs;
  ckpt.meta.loss_history = r.history.epoch_loss;
  ckpt.meta.training_mode = to_string(cfg.mode);
  ckpt.meta.interior_method = a.interior;
  ckpt.problem = problem_to_json(*problem);
  save_checkpoint(a.out, ckpt);
  emit({{"out", a.out},
        {"epochs", a.epochs},
        {"final_loss", r.history.epoch_loss.empty() ? 0.0 : r.history.epoch_loss.back()},
        {"problem_hash", ckpt.meta.problem_hash}});
  return 0;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string model;
  std::string x;
  std::string problem;
  std::string u_o;
};

int cmd_solve(const SolveArgs& a) {
  std::optional<LinConProblem> given;
  if (!a.problem.empty()) given = load_problem(a.problem);
  const Checkpoint ckpt = load_checkpoint(a.model, given ? problem_hash(*given) : std::string());
  for (const auto& w : ckpt.warnings) spdlog::warn("{}", w);
  if (!given && !ckpt.problem) throw Error("checkpoint embeds no problem; pass --problem");
  auto problem = std::make_shared<const LinConProblem>(given ? *given : problem_from_json(*ckpt.problem));
  const ReducedProblem red = reduce(problem);
  const Vec x = load_vector(a.x);
  require_dims(x.size() == red.n_inp(), "x has the wrong length for this problem");
  const Vec u_o = a.u_o.empty() ? find_interior_artificial(red, x).point : load_vector(a.u_o, "u_o");
  require_dims(u_o.size() == red.n_indep(), "u_o has the wrong length for the reduced problem");

  const PipelineOutput out = pipeline_forward(ckpt.model, red, x, u_o);
  const Vec ineq = problem->ineq_residual(out.u_full, x);
  const Vec eq = problem->eq_residual(out.u_full, x);
  json j{{"u", to_json(out.u_full)},
         {"u_o", to_json(u_o)},
         {"objective", problem->objective.value(out.u_full, x)},
         {"slacks", {{"inequality", to_json(ineq)}, {"equality", to_json(eq)}}},
         {"feasibility_violation", feasibility_violation(*problem, out.u_full, x)}};
  if (!ckpt.warnings.empty()) j["warnings"] = ckpt.warnings;
  emit(j);
  return 0;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  Index gens = 3, loads = 4, lines = 3, samples = 200;
  double fluctuation = 0.10;
  std::string methods = "loop,penalty,projection,dc3";
  int epochs = 200;
  int baseline_epochs = 200;
  std::string hidden = "16";
  bool deterministic = false;
  std::string out;
};

BenchmarkResult run_bench(const BenchArgs& a, const Globals& g) {
  const DcopfSystem sys = generate_system(a.gens, a.loads, a.lines, g.seed);
  const ReducedProblem red = reduce(to_lincon(sys));
  const DcopfDataset ds = sample_dataset(sys, red, a.samples, a.fluctuation, g.seed);

  BenchmarkConfig cfg = default_benchmark_config(g.seed, a.epochs, a.baseline_epochs);
  cfg.methods.clear();
  std::stringstream ss(a.methods);
  for (std::string m; std::getline(ss, m, ',');) {
    if (m != "loop" && m != "penalty" && m != "projection" && m != "dc3")
      throw CLI::ValidationError("--methods", "unknown method '" + m + "'");
    cfg.methods.push_back(m);
  }
  cfg.hidden = parse_hidden(a.hidden);
  cfg.deterministic = a.deterministic;
  return run_benchmark(sys, ds, cfg);
}

int cmd_bench_dcopf(const BenchArgs& a, const Globals& g) {
  std::ostringstream os;
  write_csv(os, run_bench(a, g), a.deterministic);
  write_text(a.out, os.str());
  return 0;
}

int cmd_bench_plot(const BenchArgs& a, const Globals& g) {
  std::ostringstream os;
  write_plot_data(os, run_bench(a, g));
  write_text(a.out, os.str());
  return 0;
}

void add_bench_options(CLI::App* cmd, BenchArgs& a) {
  cmd->add_option("--gens", a.gens, "number of generators")->check(CLI::Range(2, 1000));
  cmd->add_option("--loads", a.loads, "number of loads")->check(CLI::Range(1, 1000));
  cmd->add_option("--lines", a.lines, "number of lines")->check(CLI::Range(1, 1000));
  cmd->add_option("--samples", a.samples, "load samples (split 1:1)")->check(CLI::Range(2, 1000000));
  cmd->add_option("--fluctuation", a.fluctuation, "relative load fluctuation")->check(CLI::Range(0.0, 0.99));
  cmd->add_option("--methods", a.methods, "comma-separated subset of loop,penalty,projection,dc3");
  cmd->add_option("--epochs", a.epochs, "LOOP training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--baseline-epochs", a.baseline_epochs, "baseline training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--hidden", a.hidden, "hidden layer sizes, comma separated");
  cmd->add_flag("--deterministic", a.deterministic, "write zeros in the timing columns");
  cmd->add_option("--out", a.out, "output CSV (stdout if omitted)");
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("loop_lc");
  spdlog::set_default_logger(logger);
  configure_threads_from_env();

  Globals g;
  CLI::App app{"LOOP-LC: learned solvers for linearly constrained problems with hard feasibility"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  ReduceArgs reduce_args;
  auto* c_reduce = app.add_subcommand("reduce", "eliminate equalities and print the reduced problem");
  c_reduce->add_option("--problem", reduce_args.problem, "problem JSON")->required()->check(CLI::ExistingFile);
  c_reduce->add_option("--out", reduce_args.out, "output JSON (stdout if omitted)");

  InteriorArgs int_args;
  auto* c_int = app.add_subcommand("find-interior", "find a strictly interior point of the reduced polytope");
  c_int->add_option("--problem", int_args.problem, "problem JSON")->required()->check(CLI::ExistingFile);
  c_int->add_option("--x", int_args.x, "input vector JSON")->required()->check(CLI::ExistingFile);
  c_int->add_option("--method", int_args.method, "lp, bfs or two-phase")
      ->check(CLI::IsMember({"lp", "bfs", "two-phase"}));
  c_int->add_option("--big-m", int_args.big_m, "cost coefficient of the artificial slack")
      ->check(CLI::PositiveNumber);
  c_int->add_option("--phase1-model", int_args.phase1_model, "Phase-I checkpoint for two-phase")
      ->check(CLI::ExistingFile);
  c_int->add_option("--epochs", int_args.epochs, "Phase-I epochs when no model is given")
      ->check(CLI::NonNegativeNumber);

  MakeDcopfArgs mk_args;
  auto* c_mk = app.add_subcommand("make-dcopf", "write a synthetic DCOPF problem (and optional data)");
  c_mk->add_option("--gens", mk_args.gens)->check(CLI::Range(2, 1000));
  c_mk->add_option("--loads", mk_args.loads)->check(CLI::Range(1, 1000));
  c_mk->add_option("--lines", mk_args.lines)->check(CLI::Range(1, 1000));
  c_mk->add_option("--samples", mk_args.samples, "number of load samples to write")->check(CLI::NonNegativeNumber);
  c_mk->add_option("--fluctuation", mk_args.fluctuation)->check(CLI::Range(0.0, 0.99));
  c_mk->add_flag("--labels", mk_args.labels, "add QP reference optima u_star to the data");
  c_mk->add_option("--out", mk_args.problem_out, "problem JSON (stdout if omitted)");
  c_mk->add_option("--data-out", mk_args.data_out, "data JSON");

  TrainArgs tr_args;
  auto* c_train = app.add_subcommand("train", "train a LOOP-LC model");
  c_train->add_option("--problem", tr_args.problem, "problem JSON")->required()->check(CLI::ExistingFile);
  c_train->add_option("--data", tr_args.data, "data JSON with x and optional u_star")
      ->required()
      ->check(CLI::ExistingFile);
  c_train->add_option("--mode", tr_args.mode, "solver or objective")->check(CLI::IsMember({"solver", "objective"}));
  c_train->add_option("--epochs", tr_args.epochs)->check(CLI::NonNegativeNumber);
  c_train->add_option("--batch-size", tr_args.batch_size)->check(CLI::PositiveNumber);
  c_train->add_option("--lr", tr_args.learning_rate, "learning rate")->check(CLI::NonNegativeNumber);
  c_train->add_option("--grad-clip", tr_args.grad_clip, "global gradient-norm clip, 0 disables")
      ->check(CLI::NonNegativeNumber);
  c_train->add_option("--interior", tr_args.interior, "lp (per sample) or shared")
      ->check(CLI::IsMember({"lp", "shared"}));
  c_train->add_option("--hidden", tr_args.hidden, "hidden layer sizes, comma separated");
  c_train->add_option("--out", tr_args.out, "checkpoint path")->required();

  SolveArgs solve_args;
  auto* c_solve = app.add_subcommand("solve", "run a trained model on one input");
  c_solve->add_option("--model", solve_args.model, "checkpoint")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--x", solve_args.x, "input vector JSON")->required()->check(CLI::ExistingFile);
  c_solve->add_option("--problem", solve_args.problem, "problem JSON (defaults to the embedded one)")
      ->check(CLI::ExistingFile);
  c_solve->add_option("--u-o", solve_args.u_o, "interior point JSON (LP finder if omitted)")
      ->check(CLI::ExistingFile);

  BenchArgs bench_args;
  auto* c_bench = app.add_subcommand("bench", "benchmarks");
  c_bench->require_subcommand(1);
  c_bench->fallthrough();
  auto* c_dcopf = c_bench->add_subcommand("dcopf", "DCOPF comparison, one CSV row per method");
  add_bench_options(c_dcopf, bench_args);
  auto* c_plot = c_bench->add_subcommand("plot-data", "per-instance gaps as CSV");
  add_bench_options(c_plot, bench_args);

  auto* c_self = app.add_subcommand("selftest", "run the built-in invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  spdlog::set_level(spdlog::level::from_str(g.log_level));

  try {
    if (*c_reduce) return cmd_reduce(reduce_args);
    if (*c_int) return cmd_find_interior(int_args, g);
    if (*c_mk) return cmd_make_dcopf(mk_args, g);
    if (*c_train) return cmd_train(tr_args, g);
    if (*c_solve) return cmd_solve(solve_args);
    if (*c_dcopf) return cmd_bench_dcopf(bench_args, g);
    if (*c_plot) return cmd_bench_plot(bench_args, g);
    if (*c_self) {
      const json report = loop_lc_tools::run_selftest(g.seed);
      emit(report);
      return report.at("passed").get<bool>() ? 0 : 1;
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
