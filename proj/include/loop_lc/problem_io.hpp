#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "loop_lc/problem.hpp"

namespace loop_lc {

using json = nlohmann::json;

json to_json(const Vec& v);
json to_json(const Mat& m);  // row-major nested arrays
Vec vec_from_json(const json& j);
/// `cols` is used when the array is empty (0 rows).
Mat mat_from_json(const json& j, Index cols = 0);

/// Keys a_eq, b_mat_eq, b_vec_eq, a_ineq, b_mat_ineq, b_vec_ineq and a tagged
/// objective {"quadratic": {"Q", "c"}} or {"builtin": name}. Optional n_opt /
/// n_inp disambiguate empty blocks.
LinConProblem problem_from_json(const json& j);
json problem_to_json(const LinConProblem& p);

LinConProblem load_problem(const std::filesystem::path& path);
json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);

/// Input vector file: either a bare array or an object with key "x".
Vec load_vector(const std::filesystem::path& path, const std::string& key = "x");

/// BLAKE2b-256 of the canonical problem JSON, hex encoded.
std::string problem_hash(const LinConProblem& p);

}  // namespace loop_lc
