#pragma once

#include "fbb/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace fbb {

/// Box-constrained lasso
///   A = d(lambda |.|_1),  B = grad 1/2|Dx - b|^2 = D^T D x - D^T b,
///   C = N_[lo, hi].
/// No solution hint is attached.
InclusionProblem make_box_lasso(const Matrix& D, const Point& b, double lambda, const Point& lo,
                                const Point& hi);

/// Random box-lasso instance with cond(D) <= 3, a planted signal with the
/// given density, and nonnegative box [0, u]. The oracle certificate is
/// attached as the solution hint.
InclusionProblem gen_box_lasso(Eigen::Index d, double density, std::uint64_t seed);

/// Two random affine subspaces through a planted common point p as the
/// normal cones A and C, B = 0. Hint: x* = p, c = 0.
InclusionProblem gen_affine_feasibility(Eigen::Index d, std::uint64_t seed);

/// A = affine-monotone(M, q) with M = (1 - s) P + s S (P PSD, S skew, both
/// unit spectral norm), B = quadratic-gradient, C = box. Hint from the oracle.
InclusionProblem gen_monotone_affine(Eigen::Index d, double skew_fraction, std::uint64_t seed);

struct OracleResult {
    Point x_star;
    Point c_element;
    std::size_t iterations = 0;
    /// Active-set enumeration applied and agreed with the long run.
    bool cross_checked = false;
    double cross_check_gap = 0.0;
};

inline constexpr double oracle_agreement = 1e-8;
inline constexpr std::size_t oracle_max_iter = 1'000'000;

/// Long Davis-Yin run (gamma = beta, or 1 for constant B) until
/// |x - y| <= tol, certificate c = (z - x)/gamma, validated with
/// graph_member. For d <= 12 the result is cross-checked against active-set
/// enumeration when it applies. Throws oracle_failed.
OracleResult oracle_solve(const InclusionProblem& problem, double tol = 1e-12);

inline constexpr std::size_t active_set_max_combinations = 5'000'000;

/// Exhaustive KKT enumeration for problems whose monotone parts are affine
/// plus at most one l1 term and at most one box (any roles among A and C),
/// with affine B. Returns nullopt when the structure does not apply or the
/// number of face combinations exceeds max_combinations.
std::optional<Point> active_set_solve(const InclusionProblem& problem,
                                      std::size_t max_combinations = active_set_max_combinations,
                                      double tol = 1e-10);

}  // namespace fbb
