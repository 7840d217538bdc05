#include "fbb/operators.hpp"

#include "fbb/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fbb {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double inf_norm(const Point& u) { return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff(); }

void require_square(const Matrix& m, Eigen::Index dim, std::string_view what) {
    if (m.rows() != dim || m.cols() != dim) {
        throw Error(ErrorCode::invalid_input, std::string(what) + " must be " + std::to_string(dim) +
                                                  "x" + std::to_string(dim));
    }
    if (!m.allFinite()) {
        throw Error(ErrorCode::invalid_input, std::string(what) + " has non-finite entries");
    }
}

// Smallest eigenvalue of the symmetric part, compared against a scaled zero.
void require_monotone_matrix(const Matrix& m, std::string_view what) {
    if (m.rows() == 0) return;
    const Matrix sym = 0.5 * (m + m.transpose());
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
    if (min_eig < -1e-10 * scale) {
        throw Error(ErrorCode::invalid_input,
                    std::string(what) + " is not monotone (min eigenvalue of symmetric part " +
                        std::to_string(min_eig) + ")");
    }
}

void require_symmetric(const Matrix& m, std::string_view what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error(ErrorCode::invalid_input, std::string(what) + " must be symmetric");
    }
}

Point soft_threshold(const Point& v, double threshold) {
    Point out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - threshold;
        out[i] = a > 0.0 ? std::copysign(a, v[i]) : 0.0;
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// MaxMonotoneOp

MaxMonotoneOp::MaxMonotoneOp(Eigen::Index dim, monotone::Kind kind)
    : dim_(dim), kind_(std::move(kind)) {
    if (dim_ < 1) throw Error(ErrorCode::invalid_input, "dimension must be >= 1");
}

MaxMonotoneOp MaxMonotoneOp::zero(Eigen::Index dim) { return {dim, monotone::Zero{}}; }

MaxMonotoneOp MaxMonotoneOp::l1(Eigen::Index dim, double weight) {
    if (!std::isfinite(weight) || weight < 0.0) {
        throw Error(ErrorCode::invalid_input, "l1 weight must be finite and >= 0");
    }
    return {dim, monotone::L1{weight}};
}

MaxMonotoneOp MaxMonotoneOp::box(Point lo, Point hi) {
    require_dim(hi, lo.size(), "box hi");
    require_finite(lo, "box lo");
    require_finite(hi, "box hi");
    if ((lo.array() > hi.array()).any()) {
        throw Error(ErrorCode::invalid_input, "box requires lo <= hi");
    }
    const auto dim = lo.size();
    return {dim, monotone::Box{std::move(lo), std::move(hi)}};
}

MaxMonotoneOp MaxMonotoneOp::affine_cone(Matrix E, Point e) {
    if (E.rows() != e.size()) {
        throw Error(ErrorCode::invalid_input, "affine cone: E rows must match e");
    }
    if (!E.allFinite() || !e.allFinite()) {
        throw Error(ErrorCode::invalid_input, "affine cone has non-finite data");
    }
    const auto dim = E.cols();
    auto proj = std::make_shared<AffineProjector>();
    if (E.rows() == 0) {
        proj->row_basis = Matrix(dim, 0);
        proj->particular = Point::Zero(dim);
    } else {
        Eigen::JacobiSVD<Matrix> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        const double cut = s.size() > 0 ? s[0] * 1e-12 * static_cast<double>(std::max(E.rows(), E.cols())) : 0.0;
        Eigen::Index rank = 0;
        while (rank < s.size() && s[rank] > cut) ++rank;
        const Matrix V = svd.matrixV().leftCols(rank);
        const Matrix U = svd.matrixU().leftCols(rank);
        proj->row_basis = V;
        proj->particular = V * (U.transpose() * e).cwiseQuotient(s.head(rank));
        if (inf_norm(E * proj->particular - e) > 1e-8 * std::max(1.0, inf_norm(e))) {
            throw Error(ErrorCode::invalid_input, "affine cone: E x = e is inconsistent");
        }
    }
    MaxMonotoneOp op(dim, monotone::AffineCone{std::move(E), std::move(e)});
    op.projector_ = std::move(proj);
    return op;
}

MaxMonotoneOp MaxMonotoneOp::singleton(Point p) {
    require_finite(p, "singleton point");
    const auto dim = p.size();
    return {dim, monotone::Singleton{std::move(p)}};
}

MaxMonotoneOp MaxMonotoneOp::quadratic_gradient(Matrix Q, Point q) {
    require_square(Q, q.size(), "quadratic-gradient Q");
    require_finite(q, "quadratic-gradient q");
    require_symmetric(Q, "quadratic-gradient Q");
    require_monotone_matrix(Q, "quadratic-gradient Q");
    const auto dim = q.size();
    return {dim, monotone::QuadraticGradient{std::move(Q), std::move(q)}};
}

MaxMonotoneOp MaxMonotoneOp::affine_monotone(Matrix M, Point q) {
    require_square(M, q.size(), "affine-monotone M");
    require_finite(q, "affine-monotone q");
    require_monotone_matrix(M, "affine-monotone M");
    const auto dim = q.size();
    return {dim, monotone::AffineMonotone{std::move(M), std::move(q)}};
}

std::string_view MaxMonotoneOp::kind_name() const {
    return std::visit(overloaded{
                          [](const monotone::Zero&) { return std::string_view("zero"); },
                          [](const monotone::L1&) { return std::string_view("l1"); },
                          [](const monotone::Box&) { return std::string_view("normal-cone-box"); },
                          [](const monotone::AffineCone&) { return std::string_view("normal-cone-affine"); },
                          [](const monotone::Singleton&) { return std::string_view("normal-cone-singleton"); },
                          [](const monotone::QuadraticGradient&) { return std::string_view("quadratic-gradient"); },
                          [](const monotone::AffineMonotone&) { return std::string_view("affine-monotone"); },
                      },
                      kind_);
}

bool MaxMonotoneOp::is_normal_cone() const {
    return std::holds_alternative<monotone::Box>(kind_) ||
           std::holds_alternative<monotone::AffineCone>(kind_) ||
           std::holds_alternative<monotone::Singleton>(kind_);
}

bool MaxMonotoneOp::graph_member(const Point& x, const Point& u, double tol) const {
    require_dim(x, dim_, "graph point x");
    require_dim(u, dim_, "graph point u");
    if (!x.allFinite() || !u.allFinite()) return false;

    const auto linear_member = [&](const Matrix& M, const Point& q) {
        const Point image = M * x + q;
        return inf_norm(u - image) <= tol * std::max(1.0, inf_norm(image));
    };

    return std::visit(
        overloaded{
            [&](const monotone::Zero&) { return inf_norm(u) <= tol; },
            [&](const monotone::L1& a) {
                const double slack = tol * std::max(1.0, a.weight);
                for (Eigen::Index i = 0; i < dim_; ++i) {
                    if (std::abs(x[i]) <= tol) {
                        if (std::abs(u[i]) > a.weight + slack) return false;
                    } else if (std::abs(u[i] - std::copysign(a.weight, x[i])) > slack) {
                        return false;
                    }
                }
                return true;
            },
            [&](const monotone::Box& b) {
                for (Eigen::Index i = 0; i < dim_; ++i) {
                    if (x[i] < b.lo[i] - tol || x[i] > b.hi[i] + tol) return false;
                    const bool at_lo = x[i] <= b.lo[i] + tol;
                    const bool at_hi = x[i] >= b.hi[i] - tol;
                    if (at_lo && at_hi) continue;
                    if (at_lo && u[i] > tol) return false;
                    if (at_hi && u[i] < -tol) return false;
                    if (!at_lo && !at_hi && std::abs(u[i]) > tol) return false;
                }
                return true;
            },
            [&](const monotone::AffineCone& a) {
                if (a.E.rows() > 0 &&
                    inf_norm(a.E * x - a.e) > tol * std::max(1.0, inf_norm(a.e))) {
                    return false;
                }
                const Matrix& V = projector_->row_basis;
                const Point off_range = u - V * (V.transpose() * u);
                return inf_norm(off_range) <= tol * std::max(1.0, inf_norm(u));
            },
            [&](const monotone::Singleton& s) { return inf_norm(x - s.p) <= tol; },
            [&](const monotone::QuadraticGradient& g) { return linear_member(g.Q, g.q); },
            [&](const monotone::AffineMonotone& g) { return linear_member(g.M, g.q); },
        },
        kind_);
}

bool graph_member(const MaxMonotoneOp& op, const Point& x, const Point& u, double tol) {
    return op.graph_member(x, u, tol);
}

// ---------------------------------------------------------------------------
// Resolvent

Resolvent::Resolvent(const MaxMonotoneOp& op, double gamma) : op_(op), gamma_(gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw Error(ErrorCode::invalid_input, "resolvent stepsize must be finite and > 0");
    }
    const auto factor = [&](const Matrix& M) {
        const Matrix system = Matrix::Identity(op.dim(), op.dim()) + gamma * M;
        auto lu = std::make_shared<Eigen::PartialPivLU<Matrix>>(system);
        if (!(lu->rcond() > 1e-14)) {
            throw Error(ErrorCode::numerical_failure, "resolvent system (I + gamma M) is singular");
        }
        lu_ = std::move(lu);
    };
    if (const auto* g = std::get_if<monotone::QuadraticGradient>(&op.kind())) factor(g->Q);
    if (const auto* g = std::get_if<monotone::AffineMonotone>(&op.kind())) factor(g->M);
}

Point Resolvent::operator()(const Point& v) const {
    require_dim(v, op_.dim(), "resolvent argument");
    require_finite(v, "resolvent argument");
    Point y = std::visit(
        overloaded{
            [&](const monotone::Zero&) -> Point { return v; },
            [&](const monotone::L1& a) -> Point { return soft_threshold(v, gamma_ * a.weight); },
            [&](const monotone::Box& b) -> Point { return v.cwiseMax(b.lo).cwiseMin(b.hi); },
            [&](const monotone::AffineCone&) -> Point {
                const Matrix& V = op_.projector_->row_basis;
                return v - V * (V.transpose() * (v - op_.projector_->particular));
            },
            [&](const monotone::Singleton& s) -> Point { return s.p; },
            [&](const monotone::QuadraticGradient& g) -> Point { return lu_->solve(v - gamma_ * g.q); },
            [&](const monotone::AffineMonotone& g) -> Point { return lu_->solve(v - gamma_ * g.q); },
        },
        op_.kind());
    if (!y.allFinite()) {
        throw Error(ErrorCode::numerical_failure, "resolvent produced non-finite output");
    }
    return y;
}

Point resolvent_eval(const MaxMonotoneOp& op, double gamma, const Point& v) {
    return Resolvent(op, gamma)(v);
}

// ---------------------------------------------------------------------------
// CocoerciveOp

CocoerciveOp::CocoerciveOp(Eigen::Index dim, cocoercive::Kind kind, double beta)
    : dim_(dim), kind_(std::move(kind)), beta_(beta) {
    if (dim_ < 1) throw Error(ErrorCode::invalid_input, "dimension must be >= 1");
}

CocoerciveOp CocoerciveOp::zero(Eigen::Index dim) { return {dim, cocoercive::Zero{}, infinite_beta}; }

CocoerciveOp CocoerciveOp::scaled_identity(Eigen::Index dim, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::invalid_input, "scaled-identity requires finite c > 0");
    }
    return {dim, cocoercive::ScaledIdentity{c}, 1.0 / c};
}

CocoerciveOp CocoerciveOp::quadratic_gradient(Matrix Q, Point q) {
    require_square(Q, q.size(), "quadratic-gradient Q");
    require_finite(q, "quadratic-gradient q");
    require_symmetric(Q, "quadratic-gradient Q");
    require_monotone_matrix(Q, "quadratic-gradient Q");
    const double lambda = power_iteration_lambda_max(Q);
    const double beta = lambda > 0.0 ? (1.0 - 1e-8) / lambda : infinite_beta;
    const auto dim = q.size();
    return {dim, cocoercive::QuadraticGradient{std::move(Q), std::move(q)}, beta};
}

CocoerciveOp CocoerciveOp::huber_gradient(Eigen::Index dim, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw Error(ErrorCode::invalid_input, "huber-gradient requires finite delta > 0");
    }
    return {dim, cocoercive::HuberGradient{delta}, delta};
}

CocoerciveOp CocoerciveOp::with_beta(double beta) const {
    if (!(beta > 0.0)) throw Error(ErrorCode::invalid_input, "beta must be > 0");
    CocoerciveOp copy = *this;
    copy.beta_ = beta;
    return copy;
}

std::string_view CocoerciveOp::kind_name() const {
    return std::visit(overloaded{
                          [](const cocoercive::Zero&) { return std::string_view("zero"); },
                          [](const cocoercive::ScaledIdentity&) { return std::string_view("scaled-identity"); },
                          [](const cocoercive::QuadraticGradient&) { return std::string_view("quadratic-gradient"); },
                          [](const cocoercive::HuberGradient&) { return std::string_view("huber-gradient"); },
                      },
                      kind_);
}

Point CocoerciveOp::operator()(const Point& x) const {
    require_dim(x, dim_, "forward argument");
    require_finite(x, "forward argument");
    return std::visit(
        overloaded{
            [&](const cocoercive::Zero&) -> Point { return Point::Zero(dim_); },
            [&](const cocoercive::ScaledIdentity& s) -> Point { return s.c * x; },
            [&](const cocoercive::QuadraticGradient& g) -> Point { return g.Q * x + g.q; },
            [&](const cocoercive::HuberGradient& h) -> Point {
                return (x / h.delta).cwiseMax(-1.0).cwiseMin(1.0);
            },
        },
        kind_);
}

Point forward_eval(const CocoerciveOp& op, const Point& x) { return op(x); }

double power_iteration_lambda_max(const Matrix& Q, double rel_tol, std::size_t max_iter) {
    if (Q.rows() != Q.cols()) throw Error(ErrorCode::invalid_input, "power iteration needs a square matrix");
    if (Q.rows() == 0 || Q.cwiseAbs().maxCoeff() == 0.0) return 0.0;

    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss;
    Point v(Q.rows());
    for (auto& c : v) c = gauss(rng);
    v.normalize();

    Point w = Q * v;
    double rho = v.dot(w);
    double prev_delta = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < max_iter; ++it) {
        const double wn = w.norm();
        if (wn == 0.0) return 0.0;
        v = w / wn;
        w = Q * v;
        const double next = v.dot(w);
        const double delta = next - rho;
        rho = next;
        if (std::abs(delta) <= 8.0 * std::numeric_limits<double>::epsilon() * rho) break;
        if (delta > 0.0 && delta <= rel_tol * rho && std::isfinite(prev_delta) && prev_delta > 0.0) {
            const double ratio = delta / prev_delta;
            if (ratio < 1.0) {
                const double tail = delta * ratio / (1.0 - ratio);
                if (tail <= rel_tol * rho) break;
            }
        }
        prev_delta = delta;
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Sampling certifiers

namespace {

Point gaussian_point(std::mt19937_64& rng, Eigen::Index dim) {
    std::normal_distribution<double> gauss;
    Point p(dim);
    for (auto& c : p) c = gauss(rng);
    return p;
}

}  // namespace

SampleReport certify_fne(const MaxMonotoneOp& op, double gamma, std::size_t n_samples,
                         std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorCode::invalid_input, "n_samples must be >= 1");
    const Resolvent J(op, gamma);
    std::mt19937_64 rng(seed);
    SampleReport report;
    report.samples = n_samples;
    report.seed = seed;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Point u = gaussian_point(rng, op.dim());
        const Point v = gaussian_point(rng, op.dim());
        const Point dj = J(u) - J(v);
        const Point du = u - v;
        const double violation = norm_sq(dj) - inner(du, dj);
        const double scaled = violation / (1.0 + norm_sq(du));
        report.max_violation = s == 0 ? violation : std::max(report.max_violation, violation);
        report.max_scaled_violation = s == 0 ? scaled : std::max(report.max_scaled_violation, scaled);
    }
    report.passed = report.max_scaled_violation <= sample_tolerance;
    return report;
}

SampleReport certify_cocoercive(const CocoerciveOp& op, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw Error(ErrorCode::invalid_input, "n_samples must be >= 1");
    std::mt19937_64 rng(seed);
    SampleReport report;
    report.samples = n_samples;
    report.seed = seed;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const Point x = gaussian_point(rng, op.dim());
        const Point y = gaussian_point(rng, op.dim());
        const Point db = op(x) - op(y);
        const Point dx = x - y;
        const double gap_sq = norm_sq(db);
        const double cross = inner(dx, db);
        double violation = 0.0;
        if (op.beta_is_infinite()) {
            violation = gap_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        } else {
            violation = op.beta() * gap_sq - cross;
        }
        const double scaled = violation / (1.0 + norm_sq(dx) + std::abs(cross));
        report.max_violation = s == 0 ? violation : std::max(report.max_violation, violation);
        report.max_scaled_violation = s == 0 ? scaled : std::max(report.max_scaled_violation, scaled);
    }
    report.passed = report.max_scaled_violation <= sample_tolerance;
    return report;
}

}  // namespace fbb
