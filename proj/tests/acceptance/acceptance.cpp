// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "fbb/certify.hpp"
#include "fbb/error.hpp"
#include "fbb/problems.hpp"
#include "fbb/splitting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace fbb;

namespace {

constexpr double descent_rel_tol = 1e-9;
constexpr double residual_target = 1e-8;
constexpr double forward_gap_target = 1e-6;
constexpr double agreement_tol = 1e-6;
constexpr double cross_check_tol = 1e-8;
constexpr Eigen::Index cross_check_max_dim = 12;
constexpr double dr_equivalence_tol = 1e-15;
constexpr double rfb_equivalence_tol = 1e-12;
constexpr double frb_equivalence_tol = 1e-12;
constexpr int equivalence_steps = 100;
constexpr double u_residual_tol = 1e-10;
constexpr double certificate_tol = 1e-8;
constexpr double contraction_tol = 1e-3;
constexpr int contraction_steps = 200;
constexpr double dy_gamma_factor = 1.8;
constexpr std::size_t sample_count = 1000;
constexpr std::size_t iteration_cap = 100000;
constexpr std::size_t descent_iterations = 20000;
constexpr double run_tol = 1e-10;
constexpr double suite_seconds = 60.0;
const std::vector<double> descent_factors{0.1, 0.5, 0.9, 0.99};

struct Instance {
    std::string name;
    InclusionProblem problem;
    OracleResult oracle;
};

std::vector<Instance> build_suite() {
    const std::vector<Eigen::Index> lasso_dims{4, 6, 8, 10, 12, 16, 24, 32, 40, 50};
    const std::vector<Eigen::Index> affine_dims{4, 6, 8, 10, 12, 20, 30, 40, 50, 50};
    std::vector<Instance> suite;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto d = lasso_dims[i % lasso_dims.size()];
        auto p = gen_box_lasso(d, i < 10 ? 0.3 : 0.6, 100 + i);
        auto o = oracle_solve(p);
        suite.push_back({"box-lasso d=" + std::to_string(d) + " seed=" + std::to_string(100 + i), std::move(p),
                         std::move(o)});
    }
    for (std::uint64_t i = 0; i < 10; ++i) {
        const auto d = affine_dims[i];
        auto p = gen_monotone_affine(d, 0.1 * static_cast<double>(i), 200 + i);
        auto o = oracle_solve(p);
        suite.push_back({"monotone-affine d=" + std::to_string(d) + " seed=" + std::to_string(200 + i),
                         std::move(p), std::move(o)});
    }
    return suite;
}

ReferencePoint lift(const Instance& inst, double gamma) {
    return build_u_point(inst.oracle.x_star, inst.oracle.c_element, gamma, inst.problem);
}

SolverTrace solve(const InclusionProblem& p, Method method, double gamma, std::size_t max_iter, double tol,
                  bool record, const ReferencePoint* ref) {
    SolverConfig c;
    c.method = method;
    c.gamma = gamma;
    c.max_iter = max_iter;
    c.tol = tol;
    c.stop_rule = StopRule::absolute;
    c.record_iterates = record;
    c.record_timing = false;
    return run(p, c, {}, ref);
}

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// Criteria 1 and 9 share the recorded runs.
void descent_and_summability(const std::vector<Instance>& suite) {
    bool descent_ok = true;
    bool sum_ok = true;
    double worst_ratio = -INFINITY;  // worst_violation / (1 + phi1)
    double min_slack = INFINITY;     // 1 - sum / bound
    std::size_t runs = 0;
    std::string first_failure;
    for (const auto& inst : suite) {
        for (double f : descent_factors) {
            const double g = f * 0.4 * inst.problem.beta();
            const ReferencePoint ref = lift(inst, g);
            const SolverTrace t = solve(inst.problem, Method::fbb, g, descent_iterations, 1e-13, true, &ref);
            const DescentReport d = descent_check(t, ref, g, inst.problem.beta(), descent_rel_tol);
            const SummabilityReport s = summability_report(t, ref, g, inst.problem.beta());
            ++runs;
            worst_ratio = std::max(worst_ratio, d.worst_violation / (1.0 + d.phi1));
            if (!d.passed) {
                descent_ok = false;
                if (first_failure.empty()) first_failure = inst.name + " factor " + sci(f);
            }
            if (s.bound_xy > 0.0) min_slack = std::min(min_slack, 1.0 - s.sum_xy_sq / s.bound_xy);
            if (!s.bounds_applicable || !(s.sum_xy_sq <= s.bound_xy)) sum_ok = false;
        }
    }
    report(1, "Lyapunov descent", descent_ok,
           std::to_string(runs) + " runs, max violation/(1+phi1) = " + sci(worst_ratio) + " <= " +
               sci(descent_rel_tol) + (first_failure.empty() ? "" : ", first failure " + first_failure));
    report(9, "summability of |x-y|^2", sum_ok,
           std::to_string(runs) + " certified runs, min relative slack 1 - sum/bound = " + sci(min_slack));
}

void convergence_and_agreement(const std::vector<Instance>& suite) {
    bool conv_ok = true;
    bool agree_ok = true;
    bool oracle_ok = true;
    double worst_res = 0.0, worst_gap = 0.0, worst_dist = 0.0, worst_cross = 0.0;
    std::size_t max_iters = 0, crossed = 0;
    for (const auto& inst : suite) {
        const double g = default_stepsize(inst.problem.beta(), Method::fbb);
        const ReferencePoint ref = lift(inst, g);
        const SolverTrace t = solve(inst.problem, Method::fbb, g, iteration_cap, run_tol, false, &ref);
        // first iteration where both residuals are below target
        std::size_t hit = 0;
        for (const auto& row : t.rows) {
            if (row.k > 1 && row.res_xy < residual_target && row.res_dx < residual_target) {
                hit = row.k;
                break;
            }
        }
        const double gap = t.rows.empty() ? INFINITY : t.rows.back().forward_gap;
        worst_res = std::max({worst_res, t.rows.back().res_xy, t.rows.back().res_dx});
        worst_gap = std::max(worst_gap, gap);
        max_iters = std::max(max_iters, hit == 0 ? iteration_cap : hit);
        if (hit == 0 || !(gap < forward_gap_target)) conv_ok = false;

        const double dist = norm(t.x_final - inst.oracle.x_star);
        worst_dist = std::max(worst_dist, dist);
        if (!(dist <= agreement_tol)) agree_ok = false;

        if (inst.problem.dim() <= cross_check_max_dim) {
            ++crossed;
            worst_cross = std::max(worst_cross, inst.oracle.cross_check_gap);
            if (!inst.oracle.cross_checked || !(inst.oracle.cross_check_gap <= cross_check_tol)) oracle_ok = false;
        }
    }
    report(2, "convergence of residuals", conv_ok,
           "residuals < " + sci(residual_target) + " by k <= " + std::to_string(max_iters) +
               ", final max residual " + sci(worst_res) + ", max |By-Bx*| " + sci(worst_gap));
    report(3, "oracle agreement", agree_ok && oracle_ok,
           "max |x_fbb - x*| = " + sci(worst_dist) + " <= " + sci(agreement_tol) + "; " + std::to_string(crossed) +
               " instances cross-checked, max gap " + sci(worst_cross) + " <= " + sci(cross_check_tol));
}

double max_abs(const Point& a, const Point& b) { return (a - b).cwiseAbs().maxCoeff(); }

void equivalences() {
    double dr_dev = 0.0, rfb_dev = 0.0, frb_dev = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto feas = gen_affine_feasibility(6, seed);
        BoundProblem fb(feas, 1.0);
        const Point z0 = Point::LinSpaced(6, -2.0, 2.0) * static_cast<double>(seed);
        FbbState a = fbb_init(fb, z0, Point::Zero(6));
        FbbState b = a;
        for (int k = 0; k < equivalence_steps; ++k) {
            a = fbb_step(a, fb);
            b = dr_step(b, fb);
            dr_dev = std::max({dr_dev, max_abs(a.x, b.x), max_abs(a.y, b.y), max_abs(a.z, b.z)});
        }

        const auto base = gen_box_lasso(8, 0.5, seed);
        const InclusionProblem no_a(MaxMonotoneOp::zero(8), base.B(), base.C());
        const double g = default_stepsize(no_a.beta(), Method::fbb);
        BoundProblem ba(no_a, g);
        const Point y0 = Point::LinSpaced(8, 1.0, -1.0);
        FbbState f = fbb_init(ba, Point::LinSpaced(8, -2.0, 2.0) * static_cast<double>(seed), y0);
        RfbState r = rfb_init(ba, f.z, y0);
        for (int k = 0; k < equivalence_steps; ++k) {
            f = fbb_step(f, ba);
            r = rfb_step(r, ba);
            rfb_dev = std::max(rfb_dev, max_abs(f.x, r.x));
        }

        const InclusionProblem no_c(base.A(), base.B(), MaxMonotoneOp::zero(8));
        BoundProblem bc(no_c, g);
        FbbState h = fbb_init(bc, coupled_z0(no_c, y0, g), y0);
        FrbState q = frb_init(bc, y0);
        for (int k = 0; k < equivalence_steps; ++k) {
            h = fbb_step(h, bc);
            q = frb_step(q, bc);
            frb_dev = std::max(frb_dev, max_abs(h.y, q.y));
        }
    }
    const bool ok = dr_dev <= dr_equivalence_tol && rfb_dev <= rfb_equivalence_tol && frb_dev <= frb_equivalence_tol;
    report(4, "special-case equivalences", ok,
           "max deviation over " + std::to_string(equivalence_steps) + " steps: DR " + sci(dr_dev) + ", RFB " +
               sci(rfb_dev) + ", FRB " + sci(frb_dev));
}

void u_set_two_way(const std::vector<Instance>& suite) {
    double worst_lift = 0.0;
    std::size_t checked = 0, admitted = 0;
    bool ok = true;
    for (const auto& inst : suite) {
        const double g = default_stepsize(inst.problem.beta(), Method::fbb);
        const ReferencePoint ref = lift(inst, g);
        const UResidual r = u_residual(ref.z_star, ref.x_star, g, inst.problem);
        worst_lift = std::max({worst_lift, r.r1, r.r2});
        if (!(r.r1 <= u_residual_tol && r.r2 <= u_residual_tol)) ok = false;

        // Converse: every candidate with small residuals must certify.
        std::vector<std::pair<Point, Point>> candidates{{ref.z_star, ref.x_star}};
        const SolverTrace t = solve(inst.problem, Method::fbb, g, iteration_cap, 1e-13, true, nullptr);
        if (!t.iterates.empty()) candidates.emplace_back(t.iterates.back().z, t.iterates.back().x);
        candidates.emplace_back(ref.z_star + Point::Constant(inst.problem.dim(), 1e-3), ref.x_star);
        for (const auto& [z, x] : candidates) {
            ++checked;
            const UResidual cr = u_residual(z, x, g, inst.problem);
            if (cr.r1 <= u_residual_tol && cr.r2 <= u_residual_tol) {
                ++admitted;
                const SolutionHint cert = certificate_from_u_point(z, x, g, inst.problem);
                if (!certificate_holds(inst.problem, cert.x_star, cert.c_element, certificate_tol)) ok = false;
            }
        }
    }
    report(5, "set U two-way check", ok && admitted > 0,
           "lifted oracle residual max " + sci(worst_lift) + " <= " + sci(u_residual_tol) + "; " +
               std::to_string(admitted) + " of " + std::to_string(checked) +
               " candidates admitted, all certified at " + sci(certificate_tol));
}

void contraction() {
    const InclusionProblem p(MaxMonotoneOp::zero(1), CocoerciveOp::scaled_identity(1, 1.0), MaxMonotoneOp::zero(1));
    BoundProblem bound(p, 0.2);
    FbbState s = fbb_init(bound, Point::Constant(1, 1.0), Point::Constant(1, 1.0));
    double prev = std::hypot(s.y[0], s.z[0]);
    double ratio = 0.0;
    for (int k = 0; k < contraction_steps; ++k) {
        s = fbb_step(s, bound);
        const double cur = std::hypot(s.y[0], s.z[0]);
        ratio = cur / prev;
        prev = cur;
    }
    const Eigen::Matrix2d T{{-0.4, 1.0}, {-0.2, 1.0}};
    const double rho = T.eigenvalues().cwiseAbs().maxCoeff();
    report(6, "closed-form contraction", std::abs(ratio - rho) <= contraction_tol,
           "empirical factor " + sci(ratio) + " vs spectral radius " + sci(rho) + ", gap " +
               sci(std::abs(ratio - rho)) + " <= " + sci(contraction_tol));
}

void baseline(const std::vector<Instance>& suite) {
    bool ok = true;
    double worst = 0.0;
    std::size_t most = 0;
    for (const auto& inst : suite) {
        const double g = dy_gamma_factor * inst.problem.beta();
        const SolverTrace t = solve(inst.problem, Method::dy, g, iteration_cap, run_tol, false, nullptr);
        const double dist = norm(t.x_final - inst.oracle.x_star);
        worst = std::max(worst, dist);
        most = std::max(most, t.iterations);
        if (!t.converged || !(dist <= agreement_tol)) ok = false;
    }
    report(7, "Davis-Yin baseline at 1.8 beta", ok,
           "max |x_dy - x*| = " + sci(worst) + " <= " + sci(agreement_tol) + ", max iterations " +
               std::to_string(most));
}

void operator_layer() {
    Eigen::Index d = 4;
    Matrix E(2, d);
    E << 1, 0, -1, 2, 0, 1, 1, 0;
    Matrix G = Matrix::Identity(d, d) + 0.3 * Matrix::Ones(d, d);
    const Matrix Q = G.transpose() * G;
    Matrix M = Q;
    M(0, 1) += 2.0;
    M(1, 0) -= 2.0;
    const Point ones = Point::Ones(d);
    const std::vector<MaxMonotoneOp> mono{
        MaxMonotoneOp::zero(d),
        MaxMonotoneOp::l1(d, 1.0),
        MaxMonotoneOp::box(-ones, 2.0 * ones),
        MaxMonotoneOp::affine_cone(E, Point::Ones(2)),
        MaxMonotoneOp::singleton(0.5 * ones),
        MaxMonotoneOp::quadratic_gradient(Q, ones),
        MaxMonotoneOp::affine_monotone(M, -ones),
    };
    const std::vector<CocoerciveOp> coco{
        CocoerciveOp::zero(d),
        CocoerciveOp::scaled_identity(d, 1.0),
        CocoerciveOp::quadratic_gradient(Q, ones),
        CocoerciveOp::huber_gradient(d, 0.5),
    };
    bool ok = true;
    double worst = 0.0;
    std::size_t reports = 0;
    for (const auto& op : mono) {
        for (double g : {0.1, 1.0, 10.0}) {
            const SampleReport r = certify_fne(op, g, sample_count, 1234);
            worst = std::max(worst, r.max_scaled_violation);
            ok = ok && r.passed && r.samples == sample_count;
            ++reports;
        }
    }
    for (const auto& op : coco) {
        const SampleReport r = certify_cocoercive(op, sample_count, 1234);
        worst = std::max(worst, r.max_scaled_violation);
        ok = ok && r.passed && r.samples == sample_count;
        ++reports;
    }
    report(8, "operator-layer properties", ok && worst <= sample_tolerance,
           std::to_string(mono.size()) + " monotone + " + std::to_string(coco.size()) + " cocoercive kinds, " +
               std::to_string(reports) + " reports x " + std::to_string(sample_count) +
               " samples, max scaled violation " + sci(worst) + " <= " + sci(sample_tolerance));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Instance> suite;
    try {
        suite = build_suite();
    } catch (const Error& e) {
        std::printf("FAIL suite construction: %s\n", e.what());
        return 1;
    }
    const auto guarded = [](int id, const char* title, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            report(id, title, false, std::string("exception: ") + e.what());
        }
    };
    guarded(1, "Lyapunov descent", [&] { descent_and_summability(suite); });
    guarded(2, "convergence of residuals", [&] { convergence_and_agreement(suite); });
    guarded(4, "special-case equivalences", equivalences);
    guarded(5, "set U two-way check", [&] { u_set_two_way(suite); });
    guarded(6, "closed-form contraction", contraction);
    guarded(7, "Davis-Yin baseline at 1.8 beta", [&] { baseline(suite); });
    guarded(8, "operator-layer properties", operator_layer);

    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("suite: %zu instances, %.1f s (target %.0f s)\n", suite.size(), seconds, suite_seconds);
    std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
