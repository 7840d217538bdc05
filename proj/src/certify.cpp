#include "fbb/certify.hpp"

#include "fbb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbb {

UResidual u_residual(const Point& z, const Point& x, double gamma, const InclusionProblem& problem) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_input, "u_residual: gamma must be > 0");
    require_dim(z, problem.dim(), "u_residual z");
    require_dim(x, problem.dim(), "u_residual x");
    const Point bx = problem.B()(x);
    UResidual r;
    r.r1 = norm(x - resolvent_eval(problem.C(), gamma, z - gamma * bx));
    r.r2 = norm(x - resolvent_eval(problem.A(), gamma, 2.0 * x - z));
    return r;
}

ReferencePoint build_u_point(const Point& x_star, const Point& c_element, double gamma,
                             const InclusionProblem& problem, double tol) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_input, "build_u_point: gamma must be > 0");
    require_dim(x_star, problem.dim(), "x*");
    require_dim(c_element, problem.dim(), "c element");
    const Point bx = problem.B()(x_star);
    if (!problem.C().graph_member(x_star, c_element, tol)) {
        throw Error(ErrorCode::precondition_failed, "certificate: c is not in C x*");
    }
    if (!problem.A().graph_member(x_star, -c_element - bx, tol)) {
        throw Error(ErrorCode::precondition_failed, "certificate: -c - Bx* is not in A x*");
    }
    return ReferencePoint{x_star + gamma * c_element + gamma * bx, x_star, bx};
}

SolutionHint certificate_from_u_point(const Point& z, const Point& x, double gamma,
                                      const InclusionProblem& problem) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_input, "gamma must be > 0");
    require_dim(z, problem.dim(), "z");
    require_dim(x, problem.dim(), "x");
    return SolutionHint{x, (z - x - gamma * problem.B()(x)) / gamma};
}

namespace {

struct DescentCoefficients {
    double residual;  // 1 - 5g/2b
    double gap;       // 4g(2b/5 - g)
    double step;      // (5g/2b)(1 - 5g/2b)
};

DescentCoefficients descent_coefficients(double gamma, double beta) {
    const double ratio = std::isinf(beta) ? 0.0 : 2.5 * gamma / beta;
    DescentCoefficients c;
    c.residual = 1.0 - ratio;
    // Constant B: the forward-gap terms vanish identically.
    c.gap = std::isinf(beta) ? 0.0 : 4.0 * gamma * (0.4 * beta - gamma);
    c.step = ratio * (1.0 - ratio);
    return c;
}

bool gamma_in_theory(double gamma, double beta) { return gamma > 0.0 && (std::isinf(beta) || gamma < 0.4 * beta); }

void require_iterates(const SolverTrace& trace, const ReferencePoint& ref) {
    if (trace.method != Method::fbb) {
        throw Error(ErrorCode::invalid_input, "descent certification applies to fbb traces only");
    }
    if (trace.iterates.empty() || trace.iterates.size() != trace.iterations + 1) {
        throw Error(ErrorCode::missing_iterates, "trace was recorded without full iterates");
    }
    require_dim(ref.z_star, trace.iterates.front().z.size(), "reference z*");
}

double phi_at(const SolverTrace& trace, std::size_t k, const ReferencePoint& ref, double gamma, double beta) {
    const auto& cur = trace.iterates[k];
    return lyapunov(cur.z, cur.x, cur.y, trace.iterates[k - 1].by, ref, gamma, beta).phi;
}

}  // namespace

DescentReport descent_check(const SolverTrace& trace, const ReferencePoint& ref, double gamma, double beta,
                            double tol) {
    require_iterates(trace, ref);
    DescentReport report;
    report.in_theory = gamma_in_theory(gamma, beta);
    const auto coef = descent_coefficients(gamma, beta);
    const auto& it = trace.iterates;
    const std::size_t last = trace.iterations;

    if (last >= 1) report.phi1 = phi_at(trace, 1, ref, gamma, beta);
    report.threshold = tol * (1.0 + report.phi1);

    double phi_k = report.phi1;
    report.per_k.reserve(last > 0 ? last - 1 : 0);
    for (std::size_t k = 1; k + 1 <= last; ++k) {
        const double phi_next = phi_at(trace, k + 1, ref, gamma, beta);
        const double rhs = phi_k - coef.residual * norm_sq(it[k].y - it[k].x) -
                           coef.gap * norm_sq(it[k - 1].by - ref.bx_star) -
                           coef.step * norm_sq(it[k + 1].x - it[k].x);
        DescentRow row{k, phi_next, rhs, phi_next - rhs};
        report.worst_violation = report.per_k.empty() ? row.violation : std::max(report.worst_violation, row.violation);
        report.per_k.push_back(row);
        phi_k = phi_next;
    }
    report.passed = report.in_theory && report.worst_violation <= report.threshold;
    return report;
}

SummabilityReport summability_report(const SolverTrace& trace, const ReferencePoint& ref, double gamma,
                                     double beta) {
    require_iterates(trace, ref);
    SummabilityReport report;
    const auto& it = trace.iterates;
    const std::size_t last = trace.iterations;
    if (last >= 1) report.phi1 = phi_at(trace, 1, ref, gamma, beta);

    for (std::size_t k = 1; k <= last; ++k) {
        report.sum_xy_sq += norm_sq(it[k].x - it[k].y);
        if (k + 1 <= last) {
            report.sum_dx_sq += norm_sq(it[k + 1].x - it[k].x);
            report.sum_bgap_sq += norm_sq(it[k - 1].by - ref.bx_star);
        }
    }

    report.bounds_applicable = gamma_in_theory(gamma, beta);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!report.bounds_applicable) {
        report.bound_xy = report.bound_dx = report.bound_bgap = inf;
        report.within_bounds = false;
        return report;
    }
    const auto coef = descent_coefficients(gamma, beta);
    report.bound_xy = report.phi1 / coef.residual;
    report.bound_dx = coef.step > 0.0 ? report.phi1 / coef.step : inf;
    report.bound_bgap = coef.gap > 0.0 ? report.phi1 / coef.gap : inf;
    report.within_bounds = report.sum_xy_sq <= report.bound_xy && report.sum_dx_sq <= report.bound_dx &&
                           report.sum_bgap_sq <= report.bound_bgap;
    return report;
}

}  // namespace fbb
