#pragma once

#include "fbb/problem.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace fbb {

/// On-disk problem description (JSON):
///
///   { "dim": d,
///     "A": {"kind": ..., "params": {...}},
///     "B": {"kind": ..., "params": {...}, "beta": number | "infinite"},
///     "C": {"kind": ..., "params": {...}},
///     "solution_hint": {"x_star": [...], "c_element": [...]},   (optional)
///     "meta": {...} }                                            (optional)
///
/// Matrices are row-major arrays of rows. A declared beta is re-validated by
/// certify_cocoercive at load.
struct ProblemFile {
    InclusionProblem problem;
    nlohmann::json meta = nlohmann::json::object();
};

inline constexpr std::size_t beta_validation_samples = 1000;

nlohmann::json problem_to_json(const InclusionProblem& problem,
                               const nlohmann::json& meta = nlohmann::json::object());
/// Throws parse_error for schema violations, unknown kinds, or a declared
/// beta that fails validation.
ProblemFile problem_from_json(const nlohmann::json& doc, std::uint64_t validation_seed = 0);

std::string emit_problem(const InclusionProblem& problem, const nlohmann::json& meta = nlohmann::json::object());
ProblemFile parse_problem(std::string_view text, std::uint64_t validation_seed = 0);

/// io_error when the file cannot be read/written, parse_error otherwise.
ProblemFile load_problem(const std::filesystem::path& path, std::uint64_t validation_seed = 0);
void save_problem(const std::filesystem::path& path, const InclusionProblem& problem,
                  const nlohmann::json& meta = nlohmann::json::object());

}  // namespace fbb
