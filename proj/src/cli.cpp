#include "fbb/cli.hpp"

#include "fbb/certify.hpp"
#include "fbb/csv.hpp"
#include "fbb/error.hpp"
#include "fbb/problem_file.hpp"
#include "fbb/problems.hpp"
#include "fbb/splitting.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fbb::cli {
namespace {

struct CommonOptions {
    std::string problem_path;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    std::size_t max_iter = 10000;
    std::string stop_rule = "relative";
    bool no_timing = false;
    std::string out_path;
};

struct GenOptions {
    std::string kind;
    long long dim = 10;
    double density = 0.5;
    double skew = 0.5;
};

struct SolveOptions {
    std::string method = "fbb";
    std::optional<double> gamma;
    std::string trace_path;
    bool allow_unsafe = false;
    bool print_x = false;
};

struct CompareOptions {
    std::vector<std::string> methods{"fbb", "dy", "dr", "rfb", "frb"};
};

struct CertifyOptions {
    double descent_tol = descent_tolerance;
};

struct FrontierOptions {
    std::vector<double> gammas;
    std::vector<double> factors;
};

struct PlotOptions {
    std::string trace_path;
    std::string column = "res_xy";
};

std::string kv(const std::string& key, const std::string& value) { return key + "=" + value; }
std::string kv(const std::string& key, double value) { return key + "=" + format_number(value); }
std::string kv(const std::string& key, std::size_t value) { return key + "=" + std::to_string(value); }

std::string join_point(const Point& p) {
    std::string s;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (i) s += ',';
        s += format_number(p[i]);
    }
    return s;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
    return f;
}

SolverConfig base_config(const CommonOptions& common, Method method, double gamma) {
    SolverConfig cfg;
    cfg.method = method;
    cfg.gamma = gamma;
    cfg.tol = common.tol;
    cfg.max_iter = common.max_iter;
    cfg.stop_rule = parse_stop_rule(common.stop_rule);
    cfg.record_timing = !common.no_timing;
    return cfg;
}

std::optional<ReferencePoint> try_reference(const InclusionProblem& problem, double gamma) {
    const auto& hint = problem.solution_hint();
    if (!hint) return std::nullopt;
    try {
        return build_u_point(hint->x_star, hint->c_element, gamma, problem);
    } catch (const Error&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------

int cmd_gen(const CommonOptions& common, const GenOptions& gen, std::ostream& out) {
    if (gen.dim < 1) throw Error(ErrorCode::invalid_input, "--dim must be >= 1");
    const auto d = static_cast<Eigen::Index>(gen.dim);
    nlohmann::json meta{{"generator", gen.kind}, {"dim", gen.dim}, {"seed", common.seed}};
    std::optional<InclusionProblem> problem;
    if (gen.kind == "box-lasso") {
        problem = gen_box_lasso(d, gen.density, common.seed);
        meta["density"] = gen.density;
    } else if (gen.kind == "affine-feasibility") {
        problem = gen_affine_feasibility(d, common.seed);
    } else {
        problem = gen_monotone_affine(d, gen.skew, common.seed);
        meta["skew_fraction"] = gen.skew;
    }
    save_problem(common.out_path, *problem, meta);
    out << kv("generated", gen.kind) << ' ' << kv("dim", static_cast<std::size_t>(d)) << ' '
        << kv("seed", static_cast<std::size_t>(common.seed)) << ' ' << kv("out", common.out_path) << '\n';
    return exit_ok;
}

int cmd_solve(const CommonOptions& common, const SolveOptions& opts, std::ostream& out) {
    const ProblemFile file = load_problem(common.problem_path, common.seed);
    const InclusionProblem& problem = file.problem;
    const Method method = parse_method(opts.method);
    const double gamma = opts.gamma.value_or(default_stepsize(problem.beta(), method));

    SolverConfig cfg = base_config(common, method, gamma);
    cfg.allow_unsafe_gamma = opts.allow_unsafe;
    validate(cfg, problem);

    std::optional<ReferencePoint> ref;
    if (method == Method::fbb) ref = try_reference(problem, gamma);
    const SolverTrace trace = run(problem, cfg, {}, ref ? &*ref : nullptr);

    if (!opts.trace_path.empty()) {
        auto f = open_output(opts.trace_path);
        write_trace_csv(f, trace);
    }

    const double final_error = trace.rows.empty() ? 0.0 : trace.rows.back().paper_error;
    out << kv("method", std::string(to_string(method))) << ' ' << kv("gamma", gamma) << ' '
        << kv("iterations", trace.iterations) << ' ' << kv("converged", trace.converged ? "true" : "false") << ' '
        << kv("status", std::string(to_string(trace.status))) << ' ' << kv("final_paper_error", final_error) << ' '
        << kv("forward_evals", trace.counts.forward) << ' ' << kv("resolvent_evals", trace.counts.resolvent) << ' '
        << kv("wall_ns", std::to_string(trace.wall_ns)) << ' ' << kv("seed", static_cast<std::size_t>(common.seed));
    if (const auto& hint = problem.solution_hint()) out << ' ' << kv("dist_to_hint", norm(trace.x_final - hint->x_star));
    if (opts.print_x) out << ' ' << kv("final_x", join_point(trace.x_final));
    out << '\n';
    return trace.converged ? exit_ok : exit_not_converged;
}

struct CompareRow {
    std::string method;
    bool applicable = true;
    std::string status;
    double gamma = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    EvalCounts counts;
    double final_error = 0.0;
    std::int64_t wall_ns = 0;
};

int cmd_compare(const CommonOptions& common, const CompareOptions& opts, std::ostream& out) {
    const ProblemFile file = load_problem(common.problem_path, common.seed);
    const InclusionProblem& problem = file.problem;

    std::vector<Method> methods;
    for (const auto& name : opts.methods) methods.push_back(parse_method(name));

    std::vector<std::future<CompareRow>> jobs;
    for (Method m : methods) {
        jobs.push_back(std::async(std::launch::async, [&problem, &common, m]() {
            CompareRow row;
            row.method = std::string(to_string(m));
            if (!method_applies(m, problem)) {
                row.applicable = false;
                row.status = "n/a";
                return row;
            }
            row.gamma = default_stepsize(problem.beta(), m);
            const SolverTrace trace = run(problem, base_config(common, m, row.gamma));
            row.status = std::string(to_string(trace.status));
            row.iterations = trace.iterations;
            row.converged = trace.converged;
            row.counts = trace.counts;
            row.final_error = trace.rows.empty() ? 0.0 : trace.rows.back().paper_error;
            row.wall_ns = trace.wall_ns;
            return row;
        }));
    }

    std::ostringstream table;
    table << "method,status,gamma,iterations,converged,forward_evals,resolvent_evals,final_error,wall_ns\n";
    for (auto& job : jobs) {
        const CompareRow row = job.get();
        table << row.method << ',' << row.status << ',';
        if (!row.applicable) {
            table << "n/a,n/a,n/a,n/a,n/a,n/a,n/a\n";
            continue;
        }
        table << format_number(row.gamma) << ',' << std::to_string(row.iterations) << ','
              << (row.converged ? "true" : "false") << ',' << std::to_string(row.counts.forward) << ','
              << std::to_string(row.counts.resolvent) << ',' << format_number(row.final_error) << ','
              << std::to_string(row.wall_ns) << '\n';
    }
    if (!common.out_path.empty()) {
        auto f = open_output(common.out_path);
        f << table.str();
    }
    out << table.str();
    return exit_ok;
}

int cmd_certify(const CommonOptions& common, const SolveOptions& opts, const CertifyOptions& cert,
                std::ostream& out) {
    const ProblemFile file = load_problem(common.problem_path, common.seed);
    const InclusionProblem& problem = file.problem;
    if (parse_method(opts.method) != Method::fbb) {
        throw Error(ErrorCode::invalid_input, "certify supports --method fbb only");
    }
    const double beta = problem.beta();
    const double gamma = opts.gamma.value_or(default_stepsize(beta, Method::fbb));

    SolverConfig cfg = base_config(common, Method::fbb, gamma);
    cfg.allow_unsafe_gamma = opts.allow_unsafe;
    cfg.record_iterates = true;
    validate(cfg, problem);

    SolutionHint hint;
    if (problem.solution_hint()) {
        hint = *problem.solution_hint();
    } else {
        const OracleResult oracle = oracle_solve(problem);
        hint = SolutionHint{oracle.x_star, oracle.c_element};
    }
    const ReferencePoint ref = build_u_point(hint.x_star, hint.c_element, gamma, problem);
    const SolverTrace trace = run(problem, cfg, {}, &ref);
    const DescentReport report = descent_check(trace, ref, gamma, beta, cert.descent_tol);
    const SummabilityReport sums = summability_report(trace, ref, gamma, beta);

    if (!common.out_path.empty()) {
        auto f = open_output(common.out_path);
        write_descent_csv(f, report);
    } else {
        write_descent_csv(out, report);
    }

    const std::string verdict = !report.in_theory ? "out-of-theory" : (report.passed ? "pass" : "fail");
    out << kv("verdict", verdict) << ' ' << kv("gamma", gamma) << ' ' << kv("beta", beta) << ' '
        << kv("iterations", trace.iterations) << ' ' << kv("converged", trace.converged ? "true" : "false") << ' '
        << kv("phi1", report.phi1) << ' ' << kv("worst_violation", report.worst_violation) << ' '
        << kv("threshold", report.threshold) << ' ' << kv("sum_xy_sq", sums.sum_xy_sq) << ' '
        << kv("bound_xy", sums.bound_xy) << ' '
        << kv("summability", sums.bounds_applicable ? (sums.within_bounds ? "within-bounds" : "violated")
                                                    : "bound-inapplicable")
        << ' ' << kv("seed", static_cast<std::size_t>(common.seed)) << '\n';
    return verdict == "fail" ? exit_not_converged : exit_ok;
}

struct FrontierRow {
    double gamma = 0.0;
    SolverTrace trace;
};

int cmd_frontier(const CommonOptions& common, const FrontierOptions& opts, std::ostream& out) {
    const ProblemFile file = load_problem(common.problem_path, common.seed);
    const InclusionProblem& problem = file.problem;
    const double bound = stepsize_bound(problem.beta(), Method::fbb);

    std::vector<double> grid = opts.gammas;
    if (!opts.factors.empty()) {
        if (std::isinf(bound)) throw Error(ErrorCode::invalid_input, "--factors needs a finite beta");
        for (double f : opts.factors) grid.push_back(f * bound);
    }
    if (grid.empty()) throw Error(ErrorCode::invalid_input, "frontier needs --gammas or --factors");
    for (double g : grid) {
        if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::invalid_input, "grid values must be > 0");
    }

    std::vector<std::future<SolverTrace>> jobs;
    for (double g : grid) {
        jobs.push_back(std::async(std::launch::async, [&problem, &common, g]() {
            SolverConfig cfg = base_config(common, Method::fbb, g);
            cfg.allow_unsafe_gamma = true;
            return run(problem, cfg);
        }));
    }

    std::ostringstream table;
    table << "gamma,bound,ratio,flag,status,converged,iterations\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const SolverTrace trace = jobs[i].get();
        const double g = grid[i];
        std::string flag = "below-bound";
        if (std::isfinite(bound)) {
            if (std::abs(g - bound) <= 1e-12 * bound) {
                flag = "at-bound";
            } else if (g > bound) {
                flag = "above-bound";
            }
        }
        table << format_number(g) << ',' << format_number(bound) << ','
              << format_number(std::isfinite(bound) ? g / bound : 0.0) << ',' << flag << ','
              << to_string(trace.status) << ',' << (trace.converged ? "true" : "false") << ','
              << std::to_string(trace.iterations) << '\n';
    }
    if (!common.out_path.empty()) {
        auto f = open_output(common.out_path);
        f << table.str();
    }
    out << table.str();
    return exit_ok;
}

// Minimal static SVG of log10(column) against k.
int cmd_plot(const CommonOptions& common, const PlotOptions& opts, std::ostream& out) {
    std::ifstream in(opts.trace_path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open '" + opts.trace_path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::parse_error, "empty trace file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    const auto col_it = std::find(header.begin(), header.end(), opts.column);
    const auto k_it = std::find(header.begin(), header.end(), "k");
    if (col_it == header.end() || k_it == header.end()) {
        throw Error(ErrorCode::parse_error, "trace lacks column '" + opts.column + "' or 'k'");
    }
    const auto col = static_cast<std::size_t>(col_it - header.begin());
    const auto kcol = static_cast<std::size_t>(k_it - header.begin());

    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() <= std::max(col, kcol) || cells[col].empty()) continue;
        try {
            const double v = std::stod(cells[col]);
            if (v > 0.0 && std::isfinite(v)) pts.emplace_back(std::stod(cells[kcol]), std::log10(v));
        } catch (const std::exception&) {
            throw Error(ErrorCode::parse_error, "non-numeric entry in trace: '" + line + "'");
        }
    }
    if (pts.empty()) throw Error(ErrorCode::parse_error, "no positive values to plot");

    double kmin = pts.front().first, kmax = kmin, vmin = pts.front().second, vmax = vmin;
    for (const auto& [k, v] : pts) {
        kmin = std::min(kmin, k);
        kmax = std::max(kmax, k);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (kmax == kmin) kmax = kmin + 1.0;
    if (vmax == vmin) vmax = vmin + 1.0;
    constexpr double W = 640, H = 400, M = 50;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n"
        << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n"
        << "<line x1=\"50\" y1=\"350\" x2=\"610\" y2=\"350\" stroke=\"black\"/>\n"
        << "<line x1=\"50\" y1=\"50\" x2=\"50\" y2=\"350\" stroke=\"black\"/>\n"
        << "<text x=\"330\" y=\"385\" font-size=\"12\" text-anchor=\"middle\">k</text>\n"
        << "<text x=\"15\" y=\"200\" font-size=\"12\" transform=\"rotate(-90 15 200)\" text-anchor=\"middle\">log10 "
        << opts.column << "</text>\n"
        << "<text x=\"55\" y=\"45\" font-size=\"10\">" << format_number(vmax) << "</text>\n"
        << "<text x=\"55\" y=\"345\" font-size=\"10\">" << format_number(vmin) << "</text>\n"
        << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& [k, v] : pts) {
        const double px = M + (k - kmin) / (kmax - kmin) * (W - 2 * M + 20);
        const double py = H - M - (v - vmin) / (vmax - vmin) * (H - 2 * M);
        svg << format_number(std::round(px * 100) / 100) << ',' << format_number(std::round(py * 100) / 100) << ' ';
    }
    svg << "\"/>\n</svg>\n";
    auto f = open_output(common.out_path);
    f << svg.str();
    out << kv("plotted", opts.column) << ' ' << kv("points", pts.size()) << ' ' << kv("out", common.out_path) << '\n';
    return exit_ok;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::io_error:
        case ErrorCode::parse_error: return exit_io;
        case ErrorCode::invalid_input:
        case ErrorCode::unsupported_kind: return exit_usage;
        default: return exit_not_converged;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Three-operator splitting solvers with Lyapunov certification", "fbb"};
    app.require_subcommand(1);

    CommonOptions common;
    GenOptions gen;
    SolveOptions solve;
    CompareOptions compare;
    CertifyOptions certify;
    FrontierOptions frontier;
    PlotOptions plot;

    const std::vector<std::string> method_names{"fbb", "dy", "dr", "rfb", "frb"};
    const std::vector<std::string> stop_rules{"relative", "paper-relative", "absolute"};

    const auto add_seed = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "Seed for all randomness (echoed in outputs)");
    };
    const auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--problem", common.problem_path, "Problem file")->required();
        sub->add_option("--tol", common.tol, "Stopping tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", common.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
        sub->add_option("--stop-rule", common.stop_rule, "relative | paper-relative | absolute")
            ->check(CLI::IsMember(stop_rules));
        sub->add_flag("--no-timing", common.no_timing, "Write 0 for wall-clock fields");
        add_seed(sub);
    };

    auto* gen_cmd = app.add_subcommand("gen", "Generate a problem file");
    gen_cmd->add_option("--kind", gen.kind, "box-lasso | affine-feasibility | monotone-affine")
        ->required()
        ->check(CLI::IsMember({"box-lasso", "affine-feasibility", "monotone-affine"}));
    gen_cmd->add_option("--dim", gen.dim, "Dimension");
    gen_cmd->add_option("--density", gen.density, "Planted-signal density (box-lasso)");
    gen_cmd->add_option("--skew", gen.skew, "Skew fraction (monotone-affine)");
    gen_cmd->add_option("--out", common.out_path, "Output path")->required();
    add_seed(gen_cmd);

    auto* solve_cmd = app.add_subcommand("solve", "Run one solver");
    add_run_flags(solve_cmd);
    solve_cmd->add_option("--method", solve.method, "fbb | dy | dr | rfb | frb")->check(CLI::IsMember(method_names));
    solve_cmd->add_option("--gamma", solve.gamma, "Stepsize (default from beta)");
    solve_cmd->add_option("--trace", solve.trace_path, "Trace CSV path");
    solve_cmd->add_flag("--allow-unsafe-gamma", solve.allow_unsafe, "Permit gamma outside the proven range");
    solve_cmd->add_flag("--print-x", solve.print_x, "Append final_x to the summary");

    auto* compare_cmd = app.add_subcommand("compare", "Compare methods on one problem");
    add_run_flags(compare_cmd);
    compare_cmd->add_option("--methods", compare.methods, "Comma-separated methods")
        ->delimiter(',')
        ->check(CLI::IsMember(method_names));
    compare_cmd->add_option("--out", common.out_path, "CSV output path");

    auto* certify_cmd = app.add_subcommand("certify", "Check the Lyapunov descent inequality on a run");
    add_run_flags(certify_cmd);
    certify_cmd->add_option("--method", solve.method, "Must be fbb")->check(CLI::IsMember(method_names));
    certify_cmd->add_option("--gamma", solve.gamma, "Stepsize (default from beta)");
    certify_cmd->add_flag("--allow-unsafe-gamma", solve.allow_unsafe, "Permit gamma >= 2 beta / 5");
    certify_cmd->add_option("--descent-tol", certify.descent_tol, "Relative tolerance of the descent check");
    certify_cmd->add_option("--out", common.out_path, "Certification CSV path");

    auto* frontier_cmd = app.add_subcommand("frontier", "Scan fbb over a stepsize grid");
    add_run_flags(frontier_cmd);
    frontier_cmd->add_option("--gammas", frontier.gammas, "Comma-separated stepsizes")->delimiter(',');
    frontier_cmd->add_option("--factors", frontier.factors, "Comma-separated multiples of 2 beta / 5")
        ->delimiter(',');
    frontier_cmd->add_option("--out", common.out_path, "CSV output path");

    auto* plot_cmd = app.add_subcommand("plot", "Render a trace column as a static SVG");
    plot_cmd->add_option("--trace", plot.trace_path, "Trace CSV")->required();
    plot_cmd->add_option("--column", plot.column, "Column to plot (log scale)");
    plot_cmd->add_option("--out", common.out_path, "SVG output path")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(common, gen, out);
        if (solve_cmd->parsed()) return cmd_solve(common, solve, out);
        if (compare_cmd->parsed()) return cmd_compare(common, compare, out);
        if (certify_cmd->parsed()) return cmd_certify(common, solve, certify, out);
        if (frontier_cmd->parsed()) return cmd_frontier(common, frontier, out);
        if (plot_cmd->parsed()) return cmd_plot(common, plot, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_not_converged;
    }
    return exit_usage;
}

}  // namespace fbb::cli
