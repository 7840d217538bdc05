#include "fbb/problem_file.hpp"

#include "fbb/error.hpp"

#include <fstream>
#include <sstream>

namespace fbb {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json vector_json(const Point& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where + ": missing field '" + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where + ": expected a number");
    return v.get<double>();
}

Point vector_from(const json& v, Eigen::Index expected, const std::string& where) {
    if (!v.is_array()) fail(where + ": expected an array");
    if (expected >= 0 && static_cast<Eigen::Index>(v.size()) != expected) {
        fail(where + ": expected " + std::to_string(expected) + " entries, found " + std::to_string(v.size()));
    }
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = number(v[i], where);
    return p;
}

Matrix matrix_from(const json& v, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
    if (!v.is_array()) fail(where + ": expected an array of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    if (rows >= 0 && n != rows) {
        fail(where + ": expected " + std::to_string(rows) + " rows, found " + std::to_string(n));
    }
    Matrix m(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) m.row(i) = vector_from(v[static_cast<std::size_t>(i)], cols, where).transpose();
    return m;
}

json monotone_json(const MaxMonotoneOp& op) {
    json params = std::visit(
        overloaded{
            [](const monotone::Zero&) { return json::object(); },
            [](const monotone::L1& a) { return json{{"weight", a.weight}}; },
            [](const monotone::Box& b) { return json{{"lo", vector_json(b.lo)}, {"hi", vector_json(b.hi)}}; },
            [](const monotone::AffineCone& a) { return json{{"E", matrix_json(a.E)}, {"e", vector_json(a.e)}}; },
            [](const monotone::Singleton& s) { return json{{"p", vector_json(s.p)}}; },
            [](const monotone::QuadraticGradient& g) { return json{{"Q", matrix_json(g.Q)}, {"q", vector_json(g.q)}}; },
            [](const monotone::AffineMonotone& g) { return json{{"M", matrix_json(g.M)}, {"q", vector_json(g.q)}}; },
        },
        op.kind());
    return json{{"kind", std::string(op.kind_name())}, {"params", std::move(params)}};
}

json cocoercive_json(const CocoerciveOp& op) {
    json params = std::visit(
        overloaded{
            [](const cocoercive::Zero&) { return json::object(); },
            [](const cocoercive::ScaledIdentity& s) { return json{{"c", s.c}}; },
            [](const cocoercive::QuadraticGradient& g) { return json{{"Q", matrix_json(g.Q)}, {"q", vector_json(g.q)}}; },
            [](const cocoercive::HuberGradient& h) { return json{{"delta", h.delta}}; },
        },
        op.kind());
    json out{{"kind", std::string(op.kind_name())}, {"params", std::move(params)}};
    if (op.beta_is_infinite()) {
        out["beta"] = "infinite";
    } else {
        out["beta"] = op.beta();
    }
    return out;
}

MaxMonotoneOp monotone_from(const json& node, Eigen::Index d, const std::string& name) {
    const std::string kind = field(node, "kind", name).get<std::string>();
    const json params = node.contains("params") ? node.at("params") : json::object();
    const std::string where = name + " (" + kind + ")";
    try {
        if (kind == "zero") return MaxMonotoneOp::zero(d);
        if (kind == "l1") return MaxMonotoneOp::l1(d, number(field(params, "weight", where), where));
        if (kind == "normal-cone-box") {
            return MaxMonotoneOp::box(vector_from(field(params, "lo", where), d, where + " lo"),
                                      vector_from(field(params, "hi", where), d, where + " hi"));
        }
        if (kind == "normal-cone-affine") {
            const Point e = vector_from(field(params, "e", where), -1, where + " e");
            return MaxMonotoneOp::affine_cone(matrix_from(field(params, "E", where), e.size(), d, where + " E"), e);
        }
        if (kind == "normal-cone-singleton") {
            return MaxMonotoneOp::singleton(vector_from(field(params, "p", where), d, where + " p"));
        }
        if (kind == "quadratic-gradient") {
            return MaxMonotoneOp::quadratic_gradient(matrix_from(field(params, "Q", where), d, d, where + " Q"),
                                                     vector_from(field(params, "q", where), d, where + " q"));
        }
        if (kind == "affine-monotone") {
            return MaxMonotoneOp::affine_monotone(matrix_from(field(params, "M", where), d, d, where + " M"),
                                                  vector_from(field(params, "q", where), d, where + " q"));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::parse_error) throw;
        fail(where + ": " + e.what());
    }
    fail("unknown kind '" + kind + "' for operator " + name);
}

CocoerciveOp cocoercive_from(const json& node, Eigen::Index d, std::uint64_t seed) {
    const std::string kind = field(node, "kind", "B").get<std::string>();
    const json params = node.contains("params") ? node.at("params") : json::object();
    const std::string where = "B (" + kind + ")";
    auto op = [&]() -> CocoerciveOp {
        try {
            if (kind == "zero") return CocoerciveOp::zero(d);
            if (kind == "scaled-identity") return CocoerciveOp::scaled_identity(d, number(field(params, "c", where), where));
            if (kind == "quadratic-gradient") {
                return CocoerciveOp::quadratic_gradient(matrix_from(field(params, "Q", where), d, d, where + " Q"),
                                                        vector_from(field(params, "q", where), d, where + " q"));
            }
            if (kind == "huber-gradient") {
                return CocoerciveOp::huber_gradient(d, number(field(params, "delta", where), where));
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::parse_error) throw;
            fail(where + ": " + e.what());
        }
        fail("unknown kind '" + kind + "' for operator B");
    }();

    if (node.contains("beta")) {
        const json& beta = node.at("beta");
        if (beta.is_string()) {
            if (beta.get<std::string>() != "infinite") fail("B: beta must be a number or \"infinite\"");
            if (!op.beta_is_infinite()) fail("B: beta declared infinite for a non-constant operator");
        } else {
            const double declared = number(beta, "B beta");
            if (!(declared > 0.0)) fail("B: beta must be > 0");
            op = op.with_beta(declared);
            const SampleReport report = certify_cocoercive(op, beta_validation_samples, seed);
            if (!report.passed) {
                fail("B: declared beta " + std::to_string(declared) + " fails cocoercivity sampling (violation " +
                     std::to_string(report.max_violation) + ")");
            }
        }
    }
    return op;
}

}  // namespace

json problem_to_json(const InclusionProblem& problem, const json& meta) {
    json doc;
    doc["dim"] = problem.dim();
    doc["A"] = monotone_json(problem.A());
    doc["B"] = cocoercive_json(problem.B());
    doc["C"] = monotone_json(problem.C());
    if (const auto& hint = problem.solution_hint()) {
        doc["solution_hint"] = json{{"x_star", vector_json(hint->x_star)}, {"c_element", vector_json(hint->c_element)}};
    }
    if (!meta.empty()) doc["meta"] = meta;
    return doc;
}

ProblemFile problem_from_json(const json& doc, std::uint64_t validation_seed) {
    if (!doc.is_object()) fail("problem file must be a JSON object");
    const json& dim_field = field(doc, "dim", "problem");
    if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1) fail("problem: dim must be an integer >= 1");
    const auto d = static_cast<Eigen::Index>(dim_field.get<long long>());

    MaxMonotoneOp A = monotone_from(field(doc, "A", "problem"), d, "A");
    CocoerciveOp B = cocoercive_from(field(doc, "B", "problem"), d, validation_seed);
    MaxMonotoneOp C = monotone_from(field(doc, "C", "problem"), d, "C");

    std::optional<SolutionHint> hint;
    if (doc.contains("solution_hint")) {
        const json& h = doc.at("solution_hint");
        hint = SolutionHint{vector_from(field(h, "x_star", "solution_hint"), d, "solution_hint x_star"),
                            vector_from(field(h, "c_element", "solution_hint"), d, "solution_hint c_element")};
    }
    json meta = doc.contains("meta") ? doc.at("meta") : json::object();
    try {
        return ProblemFile{InclusionProblem(std::move(A), std::move(B), std::move(C), std::move(hint)), std::move(meta)};
    } catch (const Error& e) {
        fail(e.what());
    }
}

std::string emit_problem(const InclusionProblem& problem, const json& meta) {
    return problem_to_json(problem, meta).dump(2) + "\n";
}

ProblemFile parse_problem(std::string_view text, std::uint64_t validation_seed) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    try {
        return problem_from_json(doc, validation_seed);
    } catch (const json::exception& e) {
        fail(std::string("schema error: ") + e.what());
    }
}

ProblemFile load_problem(const std::filesystem::path& path, std::uint64_t validation_seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str(), validation_seed);
}

void save_problem(const std::filesystem::path& path, const InclusionProblem& problem, const json& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path.string() + "'");
    out << emit_problem(problem, meta);
    if (!out) throw Error(ErrorCode::io_error, "write failed for '" + path.string() + "'");
}

}  // namespace fbb
