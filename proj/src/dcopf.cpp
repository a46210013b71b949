#include "loop_lc/dcopf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "loop_lc/interior.hpp"
#include "loop_lc/linalg.hpp"
#include "loop_lc/pipeline.hpp"

namespace loop_lc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Line flows per unit nodal injection, slack bus 0 absorbing the balance.
Mat build_ptdf(Index n_bus, const std::vector<std::pair<Index, Index>>& lines, const Vec& b) {
  Mat bus = Mat::Zero(n_bus, n_bus);
  for (size_t l = 0; l < lines.size(); ++l) {
    const auto [i, j] = lines[l];
    bus(i, i) += b(static_cast<Index>(l));
    bus(j, j) += b(static_cast<Index>(l));
    bus(i, j) -= b(static_cast<Index>(l));
    bus(j, i) -= b(static_cast<Index>(l));
  }
  Mat ptdf = Mat::Zero(static_cast<Index>(lines.size()), n_bus);
  if (n_bus == 1) return ptdf;
  const Mat theta = bus.bottomRightCorner(n_bus - 1, n_bus - 1).ldlt().solve(Mat::Identity(n_bus - 1, n_bus - 1));
  Mat full = Mat::Zero(n_bus, n_bus);  // angle per unit injection, slack row/col zero
  full.bottomRightCorner(n_bus - 1, n_bus - 1) = theta;
  for (size_t l = 0; l < lines.size(); ++l) {
    const auto [i, j] = lines[l];
    ptdf.row(static_cast<Index>(l)) = b(static_cast<Index>(l)) * (full.row(i) - full.row(j));
  }
  return ptdf;
}

}  // namespace

DcopfSystem generate_system(Index n_gen, Index n_load, Index n_line, std::uint64_t seed) {
  if (n_gen < 2) throw Error("generate_system: at least two generators are needed");
  if (n_load < 1 || n_line < 1) throw Error("generate_system: counts must be positive");
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  DcopfSystem s;
  s.n_gen = n_gen;
  s.n_load = n_load;
  s.n_line = n_line;
  const bool ring = n_line >= 3 && uniform(0.0, 1.0) < 0.5;
  s.n_bus = ring ? n_line : n_line + 1;
  for (Index l = 0; l < n_line; ++l) s.lines.emplace_back(l, (l + 1) % s.n_bus);
  s.susceptance.resize(n_line);
  for (Index l = 0; l < n_line; ++l) s.susceptance(l) = uniform(5.0, 15.0);

  std::uniform_int_distribution<Index> pick_bus(0, s.n_bus - 1);
  for (Index g = 0; g < n_gen; ++g) s.gen_bus.push_back(pick_bus(rng));
  for (Index d = 0; d < n_load; ++d) s.load_bus.push_back(pick_bus(rng));

  s.cost_a.resize(n_gen);
  s.cost_b.resize(n_gen);
  for (Index g = 0; g < n_gen; ++g) {
    s.cost_a(g) = uniform(0.5, 2.0);
    s.cost_b(g) = uniform(1.0, 5.0);
  }
  s.base_load.resize(n_load);
  for (Index d = 0; d < n_load; ++d) s.base_load(d) = uniform(0.5, 1.5);

  // Capacity shares summing to 1.8x the base demand, comfortably above the
  // largest sampled demand (1.1x).
  Vec share(n_gen);
  for (Index g = 0; g < n_gen; ++g) share(g) = uniform(0.5, 1.5);
  const double demand = s.base_load.sum();
  s.p_max = share / share.sum() * (1.8 * demand);
  s.p_min = Vec::Zero(n_gen);

  const Mat ptdf = build_ptdf(s.n_bus, s.lines, s.susceptance);
  s.ptdf_gen = select_columns(ptdf, s.gen_bus);
  s.ptdf_load = select_columns(ptdf, s.load_bus);

  // Limits from the flows of a capacity-proportional dispatch at base load.
  const Vec p_ref = s.p_max * (demand / s.p_max.sum());
  const Vec flow = s.ptdf_gen * p_ref - s.ptdf_load * s.base_load;
  s.line_limits.resize(n_line);
  for (Index l = 0; l < n_line; ++l)
    s.line_limits(l) = std::max(std::abs(flow(l)) * uniform(1.1, 1.6), 0.1 * demand / static_cast<double>(n_load));
  return s;
}

LinConProblem to_lincon(const DcopfSystem& s) {
  const Index g = s.n_gen, d = s.n_load, l = s.n_line;
  const Index rows = 2 * g + 2 * l;
  Mat a_ineq = Mat::Zero(rows, g);
  Mat b_mat = Mat::Zero(rows, d);
  Vec b_vec = Vec::Zero(rows);
  a_ineq.topRows(g) = Mat::Identity(g, g);
  b_vec.head(g) = -s.p_max;
  a_ineq.middleRows(g, g) = -Mat::Identity(g, g);
  b_vec.segment(g, g) = s.p_min;
  a_ineq.middleRows(2 * g, l) = s.ptdf_gen;
  b_mat.middleRows(2 * g, l) = -s.ptdf_load;
  b_vec.segment(2 * g, l) = -s.line_limits;
  a_ineq.bottomRows(l) = -s.ptdf_gen;
  b_mat.bottomRows(l) = s.ptdf_load;
  b_vec.tail(l) = -s.line_limits;

  const Mat a_eq = Mat::Ones(1, g);
  const Mat b_mat_eq = -Mat::Ones(1, d);
  return make_problem(a_eq, b_mat_eq, Vec::Zero(1), a_ineq, b_mat, b_vec,
                      Objective::quadratic(Mat((2.0 * s.cost_a).asDiagonal()), s.cost_b));
}

json system_to_json(const DcopfSystem& s) {
  json lines = json::array();
  for (const auto& [i, j] : s.lines) lines.push_back({i, j});
  return {{"n_gen", s.n_gen},           {"n_load", s.n_load},       {"n_line", s.n_line},
          {"n_bus", s.n_bus},           {"cost_a", to_json(s.cost_a)}, {"cost_b", to_json(s.cost_b)},
          {"p_min", to_json(s.p_min)},  {"p_max", to_json(s.p_max)}, {"ptdf_gen", to_json(s.ptdf_gen)},
          {"ptdf_load", to_json(s.ptdf_load)}, {"line_limits", to_json(s.line_limits)},
          {"base_load", to_json(s.base_load)}, {"gen_bus", s.gen_bus}, {"load_bus", s.load_bus},
          {"lines", lines},             {"susceptance", to_json(s.susceptance)}};
}

DcopfSystem system_from_json(const json& j) {
  DcopfSystem s;
  s.n_gen = j.at("n_gen").get<Index>();
  s.n_load = j.at("n_load").get<Index>();
  s.n_line = j.at("n_line").get<Index>();
  s.n_bus = j.at("n_bus").get<Index>();
  s.cost_a = vec_from_json(j.at("cost_a"));
  s.cost_b = vec_from_json(j.at("cost_b"));
  s.p_min = vec_from_json(j.at("p_min"));
  s.p_max = vec_from_json(j.at("p_max"));
  s.ptdf_gen = mat_from_json(j.at("ptdf_gen"), s.n_gen);
  s.ptdf_load = mat_from_json(j.at("ptdf_load"), s.n_load);
  s.line_limits = vec_from_json(j.at("line_limits"));
  s.base_load = vec_from_json(j.at("base_load"));
  s.gen_bus = j.at("gen_bus").get<IndexList>();
  s.load_bus = j.at("load_bus").get<IndexList>();
  for (const auto& l : j.at("lines")) s.lines.emplace_back(l.at(0).get<Index>(), l.at(1).get<Index>());
  s.susceptance = vec_from_json(j.at("susceptance"));
  return s;
}

DcopfDataset sample_dataset(const DcopfSystem& system, const ReducedProblem& red, Index n_samples,
                            double fluctuation, std::uint64_t seed) {
  if (n_samples < 2) throw Error("sample_dataset: need at least two samples");
  if (!(fluctuation >= 0.0 && fluctuation < 1.0)) throw Error("sample_dataset: fluctuation must be in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> factor(1.0 - fluctuation, 1.0 + fluctuation);

  DcopfDataset ds;
  ds.base_load = system.base_load;
  for (Index i = 0; i < n_samples; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kResampleCap) {
        std::ostringstream os;
        os << "sample_dataset: no load sample with a nonempty interior after " << kResampleCap << " tries";
        throw EmptyInteriorError(os.str());
      }
      Vec x(system.n_load);
      for (Index d = 0; d < system.n_load; ++d) x(d) = system.base_load(d) * factor(rng);
      try {
        find_interior_artificial(red, x);
      } catch (const EmptyInteriorError&) {
        continue;
      } catch (const InfeasibleError&) {
        continue;
      }
      ds.samples.push_back(std::move(x));
      break;
    }
  }
  IndexList order(static_cast<size_t>(n_samples));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  const size_t half = order.size() / 2;
  ds.train_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
  ds.test_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
  std::sort(ds.train_idx.begin(), ds.train_idx.end());
  std::sort(ds.test_idx.begin(), ds.test_idx.end());
  return ds;
}

namespace {

template <typename Infer>
void evaluate(MethodReport& row, const LinConProblem& problem, const std::vector<Vec>& xs,
              const std::vector<Vec>& refs, Infer&& infer) {
  std::vector<Vec> preds;
  std::vector<SolutionPair> pairs;
  double total = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const auto start = Clock::now();
    Vec u = infer(i);
    total += seconds_since(start);
    row.instance_optimality_gap.push_back((u - refs[i]).lpNorm<1>() / refs[i].lpNorm<1>());
    row.instance_feasibility_gap.push_back(feasibility_violation(problem, u, xs[i]));
    pairs.emplace_back(u, xs[i]);
    preds.push_back(std::move(u));
  }
  row.metrics.optimality_gap = optimality_gap(preds, refs);
  row.metrics.feasibility_gap = feasibility_gap(problem, pairs);
  row.metrics.mean_time_per_instance = total / static_cast<double>(xs.size());
}

}  // namespace

BenchmarkConfig default_benchmark_config(std::uint64_t seed, int loop_epochs, int baseline_epochs) {
  BenchmarkConfig cfg;
  cfg.loop_train.epochs = loop_epochs;
  cfg.loop_train.seed = seed;
  cfg.loop_train.batch_size = 16;
  cfg.loop_train.learning_rate = 1e-2;
  cfg.baseline_train = cfg.loop_train;
  cfg.baseline_train.epochs = baseline_epochs;
  cfg.baseline_train.mode = TrainingMode::objective_only;
  cfg.baseline_train.learning_rate = 1e-4;
  cfg.baseline_train.grad_clip = 10.0;
  return cfg;
}

BenchmarkResult run_benchmark(const DcopfSystem& system, const DcopfDataset& dataset, const BenchmarkConfig& cfg) {
  auto problem = std::make_shared<const LinConProblem>(to_lincon(system));
  const ReducedProblem red = reduce(problem);

  std::vector<TrainingSample> train_set;
  std::vector<Vec> test_x, test_ref;
  for (Index i : dataset.train_idx) {
    const Vec& x = dataset.samples[static_cast<size_t>(i)];
    train_set.push_back({x, solve_reference(red, x)});
  }
  for (Index i : dataset.test_idx) {
    const Vec& x = dataset.samples[static_cast<size_t>(i)];
    test_x.push_back(x);
    test_ref.push_back(solve_reference(red, x));
  }

  BenchmarkResult result;
  for (const std::string& method : cfg.methods) {
    MethodReport row;
    row.method = method;
    try {
      if (method == "loop") {
        const auto start = Clock::now();
        TrainResult tr = train(make_loop_model(red, cfg.loop_train.seed, cfg.hidden), red, train_set, cfg.loop_train);
        row.train_seconds = seconds_since(start);
        std::vector<Vec> u_os;
        for (const Vec& x : test_x) u_os.push_back(find_interior_artificial(red, x, cfg.loop_train.big_m).point);
        evaluate(row, *problem, test_x, test_ref,
                 [&](size_t i) { return pipeline_forward(tr.model, red, test_x[i], u_os[i]).u_full; });
      } else {
        BaselineConfig bc = cfg.baseline;
        bc.method = baseline_method_from_string(method);
        const auto start = Clock::now();
        TrainResult tr = train_baseline(make_baseline_model(red, bc.method, cfg.baseline_train.seed, cfg.hidden), red,
                                        train_set, cfg.baseline_train, bc);
        row.train_seconds = seconds_since(start);
        evaluate(row, *problem, test_x, test_ref,
                 [&](size_t i) { return baseline_infer(tr.model, red, test_x[i], bc); });
      }
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
      row.metrics.optimality_gap = std::numeric_limits<double>::quiet_NaN();
      row.metrics.feasibility_gap = std::numeric_limits<double>::quiet_NaN();
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const BenchmarkResult& result, bool deterministic) {
  out << "method,optimality_gap,feasibility_gap,mean_inference_ms,train_seconds,status\n";
  out << std::setprecision(10);
  for (const auto& row : result.rows) {
    out << row.method << ',' << row.metrics.optimality_gap << ',' << row.metrics.feasibility_gap << ','
        << (deterministic ? 0.0 : row.metrics.mean_time_per_instance * 1e3) << ','
        << (deterministic ? 0.0 : row.train_seconds) << ',' << csv_field(row.status) << '\n';
  }
}

void write_plot_data(std::ostream& out, const BenchmarkResult& result) {
  out << "method,instance,optimality_gap,feasibility_gap\n";
  out << std::setprecision(10);
  for (const auto& row : result.rows)
    for (size_t i = 0; i < row.instance_optimality_gap.size(); ++i)
      out << row.method << ',' << i << ',' << row.instance_optimality_gap[i] << ','
          << row.instance_feasibility_gap[i] << '\n';
}

}  // namespace loop_lc
