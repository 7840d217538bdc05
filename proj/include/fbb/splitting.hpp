#pragma once

#include "fbb/lyapunov.hpp"
#include "fbb/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fbb {

enum class Method { fbb, dy, dr, rfb, frb };

std::string_view to_string(Method method);
/// Parses "fbb", "dy", "dr", "rfb", "frb"; throws invalid_input otherwise.
Method parse_method(std::string_view name);

enum class StopRule {
    /// |y - x|^2 / max(1, |x|^2) <= tol (default; defined at x = 0).
    relative,
    /// |y - x|^2 / |x|^2 <= tol, +inf at x = 0 unless y = x.
    paper_relative,
    /// max(|x - y|, |x^k - x^{k-1}|) <= tol.
    absolute,
};

std::string_view to_string(StopRule rule);
StopRule parse_stop_rule(std::string_view name);

inline constexpr double stepsize_safety_factor = 0.9;
inline constexpr double divergence_threshold = 1e12;

/// 0.9 * 2b/5 for fbb/rfb/frb, 0.9 * 2b for dy, 1 for dr or infinite beta.
double default_stepsize(double beta, Method method);

/// Open upper bound on gamma enforced by validate(); +inf when unconstrained.
double stepsize_bound(double beta, Method method);

struct SolverConfig {
    Method method = Method::fbb;
    double gamma = 0.0;
    std::size_t max_iter = 10000;
    double tol = 1e-8;
    StopRule stop_rule = StopRule::relative;
    bool allow_unsafe_gamma = false;
    /// Keep (z, x, y, By) for every k; required by descent_check.
    bool record_iterates = false;
    bool record_timing = true;
};

/// Throws invalid_input for malformed settings or an out-of-range gamma
/// without the override, unsupported_kind when the method does not apply.
void validate(const SolverConfig& config, const InclusionProblem& problem);

/// Whether the special-case method applies: dr needs B = 0, rfb A = 0, frb C = 0.
bool method_applies(Method method, const InclusionProblem& problem);

struct EvalCounts {
    std::size_t forward = 0;
    std::size_t resolvent = 0;
};

/// Resolvents of A and C bound to one stepsize plus counted forward
/// evaluations of B. One instance per run.
class BoundProblem {
public:
    BoundProblem(const InclusionProblem& problem, double gamma);

    Point resolvent_A(const Point& v);
    Point resolvent_C(const Point& v);
    Point forward(const Point& x);

    double gamma() const { return gamma_; }
    const InclusionProblem& problem() const { return *problem_; }
    const EvalCounts& counts() const { return counts_; }

private:
    const InclusionProblem* problem_;
    double gamma_;
    Resolvent ja_;
    Resolvent jc_;
    EvalCounts counts_;
};

/// Iterates of the forward-backward-backward scheme (also used by dr).
struct FbbState {
    Point z;
    Point y;
    Point by;  // B(y), cached
    Point x;
    std::size_t k = 0;
};

struct DyState {
    Point z;
    Point x;
    Point y;
    std::size_t k = 0;
};

struct RfbState {
    Point x;
    Point y;
    Point by;  // B(y), cached
    std::size_t k = 0;
};

struct FrbState {
    Point y_prev;
    Point y;
    Point by_prev;
    Point by;
    /// y_prev + g(B y_{prev-1} - B y_prev), the x-iterate of the equivalent
    /// fbb run; reported for residuals.
    Point x;
    std::size_t k = 0;
};

/// Starting state with By^0 evaluated once; x^0 is set to z^0.
FbbState fbb_init(BoundProblem& bound, const Point& z0, const Point& y0);
/// z^0 = y^0 + g B y^0, under which fbb with C = 0 reproduces frb.
Point coupled_z0(const InclusionProblem& problem, const Point& y0, double gamma);
DyState dy_init(const Point& z0);
RfbState rfb_init(BoundProblem& bound, const Point& x0, const Point& y0);
/// y^{-1} := y^0.
FrbState frb_init(BoundProblem& bound, const Point& y0);

/// x+ = J_gC(z - g By), y+ = J_gA(2x+ - z), z+ = z + y+ - x+.
FbbState fbb_step(const FbbState& state, BoundProblem& bound);
/// x+ = J_gC(z), y+ = J_gA(2x+ - z - g Bx+), z+ = z + y+ - x+.
DyState dy_step(const DyState& state, BoundProblem& bound);
/// fbb with B = 0; rejects problems whose B is not the zero operator.
FbbState dr_step(const FbbState& state, BoundProblem& bound);
/// x+ = J_gC(x - g By), y+ = 2x+ - x; rejects A != 0.
RfbState rfb_step(const RfbState& state, BoundProblem& bound);
/// y+ = J_gA(y - g By - g(By - By_prev)); rejects C != 0.
FrbState frb_step(const FrbState& state, BoundProblem& bound);

// One-off conveniences that bind the resolvents for a single step.
FbbState fbb_step(const FbbState& state, const InclusionProblem& problem, double gamma);
DyState dy_step(const DyState& state, const InclusionProblem& problem, double gamma);
FbbState dr_step(const FbbState& state, const InclusionProblem& problem, double gamma);
RfbState rfb_step(const RfbState& state, const InclusionProblem& problem, double gamma);
FrbState frb_step(const FrbState& state, const InclusionProblem& problem, double gamma);

struct InitPoints {
    std::optional<Point> z0;  // default 0
    std::optional<Point> y0;  // default 0
};

struct TraceRow {
    std::size_t k = 0;
    double res_xy = 0.0;       // |x^k - y^k|
    double res_dx = 0.0;       // |x^k - x^{k-1}|
    double paper_error = 0.0;  // value of the active stopping rule
    std::optional<double> phi;
    std::int64_t wall_ns = 0;
    double forward_gap = 0.0;  // |B y^k - B x*| when a reference is given
};

/// Full iterate k of an fbb-family run: z^k, x^k, y^k, B y^k.
struct IterateRecord {
    Point z;
    Point x;
    Point y;
    Point by;
};

enum class RunStatus { converged, max_iter, diverged };
std::string_view to_string(RunStatus status);

struct SolverTrace {
    Method method = Method::fbb;
    double gamma = 0.0;
    double beta = 0.0;
    StopRule stop_rule = StopRule::relative;
    std::vector<TraceRow> rows;
    /// iterates[k] for k = 0..iterations (iterates[0] is the start) when
    /// record_iterates was set; empty otherwise.
    std::vector<IterateRecord> iterates;
    Point x_final;
    std::size_t iterations = 0;
    bool converged = false;
    RunStatus status = RunStatus::max_iter;
    std::string message;
    EvalCounts counts;
    std::int64_t wall_ns = 0;
};

/// Value of the stopping-rule formula for one row.
double stopping_error(StopRule rule, const Point& x, const Point& y, double res_dx);

/// Iterates until the stopping rule fires or max_iter is reached. Divergence
/// (an iterate with norm > 1e12 or non-finite) ends the run with
/// status diverged; the trace collected so far is kept. When `reference` is
/// given and the method is fbb, rows carry the Lyapunov value.
SolverTrace run(const InclusionProblem& problem, const SolverConfig& config,
                const InitPoints& init = {}, const ReferencePoint* reference = nullptr);

}  // namespace fbb
