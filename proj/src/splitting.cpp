#include "fbb/splitting.hpp"

#include "fbb/error.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <variant>

namespace fbb {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::fbb: return "fbb";
        case Method::dy: return "dy";
        case Method::dr: return "dr";
        case Method::rfb: return "rfb";
        case Method::frb: return "frb";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (auto m : {Method::fbb, Method::dy, Method::dr, Method::rfb, Method::frb}) {
        if (to_string(m) == name) return m;
    }
    throw Error(ErrorCode::invalid_input, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(StopRule rule) {
    switch (rule) {
        case StopRule::relative: return "relative";
        case StopRule::paper_relative: return "paper-relative";
        case StopRule::absolute: return "absolute";
    }
    return "unknown";
}

StopRule parse_stop_rule(std::string_view name) {
    for (auto r : {StopRule::relative, StopRule::paper_relative, StopRule::absolute}) {
        if (to_string(r) == name) return r;
    }
    throw Error(ErrorCode::invalid_input, "unknown stopping rule '" + std::string(name) + "'");
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iter: return "max-iter";
        case RunStatus::diverged: return "diverged";
    }
    return "unknown";
}

double default_stepsize(double beta, Method method) {
    if (method == Method::dr || std::isinf(beta)) return 1.0;
    if (method == Method::dy) return stepsize_safety_factor * 2.0 * beta;
    return stepsize_safety_factor * 0.4 * beta;
}

double stepsize_bound(double beta, Method method) {
    if (std::isinf(beta)) return std::numeric_limits<double>::infinity();
    switch (method) {
        case Method::fbb: return 0.4 * beta;
        case Method::dy: return 2.0 * beta;
        default: return std::numeric_limits<double>::infinity();
    }
}

bool method_applies(Method method, const InclusionProblem& problem) {
    switch (method) {
        case Method::dr: return problem.B().is_zero();
        case Method::rfb: return problem.A().is_zero();
        case Method::frb: return problem.C().is_zero();
        default: return true;
    }
}

void validate(const SolverConfig& config, const InclusionProblem& problem) {
    if (!(config.gamma > 0.0) || !std::isfinite(config.gamma)) {
        throw Error(ErrorCode::invalid_input, "gamma must be finite and > 0");
    }
    if (config.max_iter < 1) throw Error(ErrorCode::invalid_input, "max_iter must be >= 1");
    if (!(config.tol > 0.0)) throw Error(ErrorCode::invalid_input, "tol must be > 0");
    if (!method_applies(config.method, problem)) {
        throw Error(ErrorCode::unsupported_kind,
                    std::string(to_string(config.method)) + " does not apply to this problem");
    }
    const double bound = stepsize_bound(problem.beta(), config.method);
    if (!config.allow_unsafe_gamma && config.gamma >= bound) {
        throw Error(ErrorCode::invalid_input,
                    "gamma = " + std::to_string(config.gamma) + " is outside the convergent range (0, " +
                        std::to_string(bound) + ") for " + std::string(to_string(config.method)) +
                        "; pass the unsafe-gamma override to run anyway");
    }
}

// ---------------------------------------------------------------------------

BoundProblem::BoundProblem(const InclusionProblem& problem, double gamma)
    : problem_(&problem), gamma_(gamma), ja_(problem.A(), gamma), jc_(problem.C(), gamma) {}

Point BoundProblem::resolvent_A(const Point& v) {
    ++counts_.resolvent;
    return ja_(v);
}

Point BoundProblem::resolvent_C(const Point& v) {
    ++counts_.resolvent;
    return jc_(v);
}

Point BoundProblem::forward(const Point& x) {
    ++counts_.forward;
    return problem_->B()(x);
}

namespace {

// Arguments of resolvents and new iterates must stay finite.
const Point& checked(const Point& p, const char* what) {
    if (!p.allFinite()) {
        throw Error(ErrorCode::divergence_detected, std::string(what) + " became non-finite");
    }
    return p;
}

void require_start(const Point& p, Eigen::Index dim, const char* what) {
    require_dim(p, dim, what);
    require_finite(p, what);
}

}  // namespace

FbbState fbb_init(BoundProblem& bound, const Point& z0, const Point& y0) {
    const auto d = bound.problem().dim();
    require_start(z0, d, "z0");
    require_start(y0, d, "y0");
    return FbbState{z0, y0, bound.forward(y0), z0, 0};
}

Point coupled_z0(const InclusionProblem& problem, const Point& y0, double gamma) {
    return y0 + gamma * problem.B()(y0);
}

DyState dy_init(const Point& z0) {
    require_finite(z0, "z0");
    return DyState{z0, z0, z0, 0};
}

RfbState rfb_init(BoundProblem& bound, const Point& x0, const Point& y0) {
    const auto d = bound.problem().dim();
    require_start(x0, d, "x0");
    require_start(y0, d, "y0");
    return RfbState{x0, y0, bound.forward(y0), 0};
}

FrbState frb_init(BoundProblem& bound, const Point& y0) {
    require_start(y0, bound.problem().dim(), "y0");
    Point by = bound.forward(y0);
    return FrbState{y0, y0, by, by, y0, 0};
}

FbbState fbb_step(const FbbState& s, BoundProblem& bound) {
    const double g = bound.gamma();
    FbbState next;
    next.x = checked(bound.resolvent_C(checked(s.z - g * s.by, "forward-backward argument")), "x");
    next.y = checked(bound.resolvent_A(2.0 * next.x - s.z), "y");
    next.z = checked(s.z + next.y - next.x, "z");
    next.by = checked(bound.forward(next.y), "By");
    next.k = s.k + 1;
    return next;
}

DyState dy_step(const DyState& s, BoundProblem& bound) {
    const double g = bound.gamma();
    DyState next;
    next.x = checked(bound.resolvent_C(s.z), "x");
    const Point bx = bound.forward(next.x);
    next.y = checked(bound.resolvent_A(checked(2.0 * next.x - s.z - g * bx, "reflected argument")), "y");
    next.z = checked(s.z + next.y - next.x, "z");
    next.k = s.k + 1;
    return next;
}

FbbState dr_step(const FbbState& s, BoundProblem& bound) {
    if (!bound.problem().B().is_zero()) {
        throw Error(ErrorCode::unsupported_kind, "dr requires B = 0");
    }
    FbbState next;
    next.x = checked(bound.resolvent_C(s.z), "x");
    next.y = checked(bound.resolvent_A(2.0 * next.x - s.z), "y");
    next.z = checked(s.z + next.y - next.x, "z");
    next.by = Point::Zero(s.z.size());
    next.k = s.k + 1;
    return next;
}

RfbState rfb_step(const RfbState& s, BoundProblem& bound) {
    if (!bound.problem().A().is_zero()) {
        throw Error(ErrorCode::unsupported_kind, "rfb requires A = 0");
    }
    const double g = bound.gamma();
    RfbState next;
    next.x = checked(bound.resolvent_C(checked(s.x - g * s.by, "forward-backward argument")), "x");
    next.y = 2.0 * next.x - s.x;
    next.by = checked(bound.forward(next.y), "By");
    next.k = s.k + 1;
    return next;
}

FrbState frb_step(const FrbState& s, BoundProblem& bound) {
    if (!bound.problem().C().is_zero()) {
        throw Error(ErrorCode::unsupported_kind, "frb requires C = 0");
    }
    const double g = bound.gamma();
    FrbState next;
    next.x = s.y + g * (s.by_prev - s.by);
    next.y_prev = s.y;
    next.y = checked(bound.resolvent_A(checked(s.y - g * s.by - g * (s.by - s.by_prev), "reflected argument")), "y");
    next.by_prev = s.by;
    next.by = checked(bound.forward(next.y), "By");
    next.k = s.k + 1;
    return next;
}

FbbState fbb_step(const FbbState& state, const InclusionProblem& problem, double gamma) {
    BoundProblem bound(problem, gamma);
    return fbb_step(state, bound);
}

DyState dy_step(const DyState& state, const InclusionProblem& problem, double gamma) {
    BoundProblem bound(problem, gamma);
    return dy_step(state, bound);
}

FbbState dr_step(const FbbState& state, const InclusionProblem& problem, double gamma) {
    BoundProblem bound(problem, gamma);
    return dr_step(state, bound);
}

RfbState rfb_step(const RfbState& state, const InclusionProblem& problem, double gamma) {
    BoundProblem bound(problem, gamma);
    return rfb_step(state, bound);
}

FrbState frb_step(const FrbState& state, const InclusionProblem& problem, double gamma) {
    BoundProblem bound(problem, gamma);
    return frb_step(state, bound);
}

// ---------------------------------------------------------------------------

double stopping_error(StopRule rule, const Point& x, const Point& y, double res_dx) {
    const double gap_sq = norm_sq(y - x);
    switch (rule) {
        case StopRule::relative: return gap_sq / std::max(1.0, norm_sq(x));
        case StopRule::paper_relative: {
            const double xs = norm_sq(x);
            if (xs > 0.0) return gap_sq / xs;
            return gap_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        case StopRule::absolute: return std::max(std::sqrt(gap_sq), res_dx);
    }
    return std::numeric_limits<double>::infinity();
}

namespace {

using AnyState = std::variant<FbbState, DyState, RfbState, FrbState>;

AnyState initial_state(Method method, BoundProblem& bound, const Point& z0, const Point& y0) {
    switch (method) {
        case Method::fbb:
        case Method::dr: return fbb_init(bound, z0, y0);
        case Method::dy: return dy_init(z0);
        case Method::rfb: return rfb_init(bound, z0, y0);
        case Method::frb: return frb_init(bound, y0);
    }
    throw Error(ErrorCode::invalid_input, "unknown method");
}

AnyState advance(Method method, const AnyState& state, BoundProblem& bound) {
    switch (method) {
        case Method::fbb: return fbb_step(std::get<FbbState>(state), bound);
        case Method::dr: return dr_step(std::get<FbbState>(state), bound);
        case Method::dy: return dy_step(std::get<DyState>(state), bound);
        case Method::rfb: return rfb_step(std::get<RfbState>(state), bound);
        case Method::frb: return frb_step(std::get<FrbState>(state), bound);
    }
    throw Error(ErrorCode::invalid_input, "unknown method");
}

IterateRecord record_of(const AnyState& state) {
    return std::visit(
        [](const auto& s) -> IterateRecord {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, FbbState>) {
                return {s.z, s.x, s.y, s.by};
            } else if constexpr (std::is_same_v<S, DyState>) {
                return {s.z, s.x, s.y, Point()};
            } else if constexpr (std::is_same_v<S, RfbState>) {
                return {s.x, s.x, s.y, s.by};
            } else {
                return {Point(), s.x, s.y, s.by};
            }
        },
        state);
}

const Point& x_of(const AnyState& state) {
    return std::visit([](const auto& s) -> const Point& { return s.x; }, state);
}

const Point& y_of(const AnyState& state) {
    return std::visit([](const auto& s) -> const Point& { return s.y; }, state);
}

double largest_norm(const AnyState& state) {
    return std::visit(
        [](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            double m = std::max(norm(s.x), norm(s.y));
            if constexpr (std::is_same_v<S, FbbState> || std::is_same_v<S, DyState>) m = std::max(m, norm(s.z));
            return m;
        },
        state);
}

}  // namespace

SolverTrace run(const InclusionProblem& problem, const SolverConfig& config, const InitPoints& init,
                const ReferencePoint* reference) {
    validate(config, problem);
    const auto d = problem.dim();
    const Point z0 = init.z0.value_or(Point::Zero(d));
    const Point y0 = init.y0.value_or(Point::Zero(d));
    if (reference) {
        require_dim(reference->z_star, d, "reference z*");
        require_dim(reference->x_star, d, "reference x*");
        require_dim(reference->bx_star, d, "reference Bx*");
    }

    const auto start = std::chrono::steady_clock::now();
    const auto elapsed_ns = [&]() -> std::int64_t {
        if (!config.record_timing) return 0;
        return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
            .count();
    };

    SolverTrace trace;
    trace.method = config.method;
    trace.gamma = config.gamma;
    trace.beta = problem.beta();
    trace.stop_rule = config.stop_rule;
    trace.rows.reserve(std::min<std::size_t>(config.max_iter, 1u << 16));

    BoundProblem bound(problem, config.gamma);
    AnyState state = initial_state(config.method, bound, z0, y0);
    if (config.record_iterates) trace.iterates.push_back(record_of(state));
    const bool with_phi = reference != nullptr && config.method == Method::fbb;

    trace.status = RunStatus::max_iter;
    for (std::size_t k = 1; k <= config.max_iter; ++k) {
        AnyState next;
        try {
            next = advance(config.method, state, bound);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::divergence_detected) throw;
            trace.status = RunStatus::diverged;
            trace.message = e.what();
            break;
        }

        const Point& x = x_of(next);
        const Point& y = y_of(next);
        TraceRow row;
        row.k = k;
        row.res_xy = norm(x - y);
        row.res_dx = norm(x - x_of(state));
        row.paper_error = stopping_error(config.stop_rule, x, y, row.res_dx);
        if (with_phi) {
            const auto& prev = std::get<FbbState>(state);
            const auto& cur = std::get<FbbState>(next);
            row.phi = lyapunov(cur.z, cur.x, cur.y, prev.by, *reference, config.gamma, problem.beta()).phi;
            row.forward_gap = norm(cur.by - reference->bx_star);
        }
        row.wall_ns = elapsed_ns();
        trace.rows.push_back(row);
        if (config.record_iterates) trace.iterates.push_back(record_of(next));
        state = std::move(next);
        trace.iterations = k;

        if (!(largest_norm(state) <= divergence_threshold)) {
            trace.status = RunStatus::diverged;
            trace.message = "iterate norm exceeded 1e12";
            break;
        }
        if (row.paper_error <= config.tol) {
            trace.status = RunStatus::converged;
            break;
        }
    }

    trace.converged = trace.status == RunStatus::converged;
    trace.x_final = x_of(state);
    trace.counts = bound.counts();
    trace.wall_ns = elapsed_ns();
    return trace;
}

}  // namespace fbb
