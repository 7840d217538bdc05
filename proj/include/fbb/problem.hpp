#pragma once

#include "fbb/operators.hpp"

#include <optional>

namespace fbb {

/// Certificate for 0 in Ax* + Bx* + Cx*: c_element in C x*, and the
/// remainder -c_element - B x* in A x*.
struct SolutionHint {
    Point x_star;
    Point c_element;
};

inline constexpr double certificate_tolerance = 1e-8;

/// The inclusion 0 in Ax + Bx + Cx with A, C maximal monotone and B
/// cocoercive. Immutable; safe to share between concurrent solver runs.
class InclusionProblem {
public:
    /// Throws invalid_input on dimension mismatch or when a supplied hint
    /// fails the certificate check at certificate_tolerance.
    InclusionProblem(MaxMonotoneOp A, CocoerciveOp B, MaxMonotoneOp C,
                     std::optional<SolutionHint> hint = std::nullopt);

    const MaxMonotoneOp& A() const { return A_; }
    const CocoerciveOp& B() const { return B_; }
    const MaxMonotoneOp& C() const { return C_; }
    Eigen::Index dim() const { return A_.dim(); }
    double beta() const { return B_.beta(); }

    const std::optional<SolutionHint>& solution_hint() const { return hint_; }
    InclusionProblem with_hint(SolutionHint hint) const;

    /// Zero problem A = B = C = 0.
    static InclusionProblem zero(Eigen::Index dim);

private:
    MaxMonotoneOp A_;
    CocoerciveOp B_;
    MaxMonotoneOp C_;
    std::optional<SolutionHint> hint_;
};

/// graph_member(C, x, c) and graph_member(A, x, -c - Bx), both at tol.
bool certificate_holds(const InclusionProblem& problem, const Point& x_star,
                       const Point& c_element, double tol = certificate_tolerance);

}  // namespace fbb
