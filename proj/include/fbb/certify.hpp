#pragma once

#include "fbb/lyapunov.hpp"
#include "fbb/problem.hpp"
#include "fbb/splitting.hpp"

#include <cstddef>
#include <vector>

namespace fbb {

/// Distances to the two fixed-point equations
///   r1 = |x - J_gC(z - g Bx)|,  r2 = |x - J_gA(2x - z)|.
/// (z, x) belongs to the fixed-point set iff both vanish.
struct UResidual {
    double r1 = 0.0;
    double r2 = 0.0;
};

UResidual u_residual(const Point& z, const Point& x, double gamma, const InclusionProblem& problem);

/// Lifts a certified zero x* (with c in C x* and -c - Bx* in A x*) to
/// z* = x* + g c + g Bx*. Throws precondition_failed when either graph
/// membership fails at tol.
ReferencePoint build_u_point(const Point& x_star, const Point& c_element, double gamma,
                             const InclusionProblem& problem, double tol = certificate_tolerance);

/// Reverse direction: c = (z - x - g Bx) / g is the C-part of the
/// zero-inclusion certificate at x (and (x - z)/g the A-part).
SolutionHint certificate_from_u_point(const Point& z, const Point& x, double gamma,
                                      const InclusionProblem& problem);

inline constexpr double descent_tolerance = 1e-9;

/// Row k compares phi_{k+1} with the right-hand side built from step k:
///   phi_k - (1 - 5g/2b)|y^k - x^k|^2 - 4g(2b/5 - g)|By^{k-1} - Bx*|^2
///         - (5g/2b)(1 - 5g/2b)|x^{k+1} - x^k|^2.
struct DescentRow {
    std::size_t k = 0;
    double phi = 0.0;        // phi_{k+1}
    double rhs_bound = 0.0;  // right-hand side above
    double violation = 0.0;  // phi - rhs_bound
};

struct DescentReport {
    double worst_violation = 0.0;
    double phi1 = 0.0;
    double threshold = 0.0;  // tol * (1 + phi1)
    /// gamma in (0, 2b/5): every coefficient of the descent inequality is positive.
    bool in_theory = true;
    bool passed = true;  // in_theory && worst_violation <= threshold
    std::vector<DescentRow> per_k;
};

/// Requires a trace of an fbb run recorded with full iterates
/// (missing_iterates otherwise).
DescentReport descent_check(const SolverTrace& trace, const ReferencePoint& ref, double gamma, double beta,
                            double tol = descent_tolerance);

struct SummabilityReport {
    double phi1 = 0.0;
    double sum_xy_sq = 0.0;    // sum_{k>=1} |x^k - y^k|^2
    double sum_dx_sq = 0.0;    // sum_{k>=1} |x^{k+1} - x^k|^2
    double sum_bgap_sq = 0.0;  // sum_{k>=1} |By^{k-1} - Bx*|^2
    double bound_xy = 0.0;     // phi1 / (1 - 5g/2b)
    double bound_dx = 0.0;     // phi1 / ((5g/2b)(1 - 5g/2b))
    double bound_bgap = 0.0;   // phi1 / (4g(2b/5 - g))
    /// false when gamma >= 2b/5: no bound is claimed and bounds are +inf.
    bool bounds_applicable = true;
    bool within_bounds = true;
};

SummabilityReport summability_report(const SolverTrace& trace, const ReferencePoint& ref, double gamma,
                                     double beta);

}  // namespace fbb
