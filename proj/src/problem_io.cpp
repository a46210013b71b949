#include "loop_lc/problem_io.hpp"

#include <sodium.h>

#include <fstream>

namespace loop_lc {

namespace {

// Writes -0.0 as 0.0.
double unsigned_zero(double v) { return v == 0.0 ? 0.0 : v; }

}  // namespace

json to_json(const Vec& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(unsigned_zero(v(i)));
  return arr;
}

json to_json(const Mat& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(unsigned_zero(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vec vec_from_json(const json& j) {
  if (!j.is_array()) throw Error("expected a JSON array of numbers");
  Vec v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

Mat mat_from_json(const json& j, Index cols) {
  if (!j.is_array()) throw Error("expected a JSON array of rows");
  if (j.empty()) return Mat(0, cols);
  const Index rows = static_cast<Index>(j.size());
  const Index ncols = static_cast<Index>(j[0].size());
  Mat m(rows, ncols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != ncols)
      throw DimensionError("ragged matrix row " + std::to_string(r));
    for (Index c = 0; c < ncols; ++c) m(r, c) = row[static_cast<size_t>(c)].get<double>();
  }
  return m;
}

namespace {

Index infer_cols(const json& j, const char* key) {
  if (!j.contains(key)) return -1;
  const json& m = j.at(key);
  if (m.is_array() && !m.empty() && m[0].is_array()) return static_cast<Index>(m[0].size());
  return -1;
}

Objective objective_from_json(const json& j, Index n_opt) {
  if (j.contains("quadratic")) {
    const json& q = j.at("quadratic");
    Mat qm = mat_from_json(q.at("Q"), n_opt);
    Vec c = q.contains("c") ? vec_from_json(q.at("c")) : Vec::Zero(qm.rows());
    return Objective::quadratic(std::move(qm), std::move(c));
  }
  if (j.contains("builtin")) return Objective::builtin(j.at("builtin").get<std::string>());
  throw Error("objective must be {\"quadratic\": ...} or {\"builtin\": name}");
}

}  // namespace

LinConProblem problem_from_json(const json& j) {
  try {
    Index n_opt = j.value("n_opt", Index{-1});
    Index n_inp = j.value("n_inp", Index{-1});
    if (n_opt < 0) n_opt = std::max(infer_cols(j, "a_eq"), infer_cols(j, "a_ineq"));
    if (n_inp < 0) n_inp = std::max(infer_cols(j, "b_mat_eq"), infer_cols(j, "b_mat_ineq"));
    if (n_opt < 0) throw DimensionError("cannot infer n_opt; give it explicitly");
    if (n_inp < 0) n_inp = 0;

    auto mat_or_empty = [&](const char* key, Index cols, Index rows_hint) {
      if (!j.contains(key)) return Mat(rows_hint, cols);
      return mat_from_json(j.at(key), cols);
    };
    LinConProblem p;
    p.n_opt = n_opt;
    p.n_inp = n_inp;
    p.a_eq = mat_or_empty("a_eq", n_opt, 0);
    p.a_ineq = mat_or_empty("a_ineq", n_opt, 0);
    p.b_mat_eq = mat_or_empty("b_mat_eq", n_inp, p.a_eq.rows());
    p.b_mat_ineq = mat_or_empty("b_mat_ineq", n_inp, p.a_ineq.rows());
    if (p.b_mat_eq.size() == 0) p.b_mat_eq = Mat::Zero(p.a_eq.rows(), n_inp);
    if (p.b_mat_ineq.size() == 0) p.b_mat_ineq = Mat::Zero(p.a_ineq.rows(), n_inp);
    p.b_vec_eq = j.contains("b_vec_eq") ? vec_from_json(j.at("b_vec_eq")) : Vec::Zero(p.a_eq.rows());
    p.b_vec_ineq =
        j.contains("b_vec_ineq") ? vec_from_json(j.at("b_vec_ineq")) : Vec::Zero(p.a_ineq.rows());
    if (!j.contains("objective")) throw Error("problem file has no objective");
    p.objective = objective_from_json(j.at("objective"), n_opt);
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed problem JSON: ") + e.what());
  }
}

json problem_to_json(const LinConProblem& p) {
  json j;
  j["n_opt"] = p.n_opt;
  j["n_inp"] = p.n_inp;
  j["a_eq"] = to_json(p.a_eq);
  j["b_mat_eq"] = to_json(p.b_mat_eq);
  j["b_vec_eq"] = to_json(p.b_vec_eq);
  j["a_ineq"] = to_json(p.a_ineq);
  j["b_mat_ineq"] = to_json(p.b_mat_ineq);
  j["b_vec_ineq"] = to_json(p.b_vec_ineq);
  if (const auto& q = p.objective.quadratic_form()) {
    j["objective"] = {{"quadratic", {{"Q", to_json(q->q)}, {"c", to_json(q->c)}}}};
  } else if (!p.objective.builtin_name().empty()) {
    j["objective"] = {{"builtin", p.objective.builtin_name()}};
  } else {
    throw Error("custom objectives cannot be serialised");
  }
  return j;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("cannot parse '" + path.string() + "': " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

LinConProblem load_problem(const std::filesystem::path& path) {
  return problem_from_json(load_json(path));
}

Vec load_vector(const std::filesystem::path& path, const std::string& key) {
  const json j = load_json(path);
  if (j.is_array()) return vec_from_json(j);
  if (j.is_object() && j.contains(key)) return vec_from_json(j.at(key));
  throw Error("'" + path.string() + "' is neither an array nor an object with key '" + key + "'");
}

std::string problem_hash(const LinConProblem& p) {
  if (sodium_init() < 0) throw Error("libsodium initialisation failed");
  const std::string canonical = problem_to_json(p).dump();
  unsigned char digest[32];
  crypto_generichash(digest, sizeof digest, reinterpret_cast<const unsigned char*>(canonical.data()),
                     canonical.size(), nullptr, 0);
  char hex[2 * sizeof digest + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
  return std::string(hex);
}

}  // namespace loop_lc
