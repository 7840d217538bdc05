#include "fbb/problems.hpp"

#include "fbb/error.hpp"
#include "fbb/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fbb {

namespace detail {
std::optional<SolutionHint> active_set_certificate(const InclusionProblem& problem, std::size_t max_combinations,
                                                   double tol);
}

namespace {

Matrix gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> gauss;
    Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    }
    return m;
}

Point gaussian_point(std::mt19937_64& rng, Eigen::Index d) { return gaussian_matrix(rng, d, 1).col(0); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Matrix random_orthogonal(std::mt19937_64& rng, Eigen::Index d) {
    const Matrix g = gaussian_matrix(rng, d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(d, d);
}

// U diag(s) V^T with singular values drawn from [1, 3].
Matrix well_conditioned(std::mt19937_64& rng, Eigen::Index d) {
    const Matrix U = random_orthogonal(rng, d);
    const Matrix V = random_orthogonal(rng, d);
    Point s(d);
    for (auto& v : s) v = uniform(rng, 1.0, 3.0);
    return U * s.asDiagonal() * V.transpose();
}

void require_dimension(Eigen::Index d) {
    if (d < 1) throw Error(ErrorCode::invalid_input, "dimension must be >= 1");
}

CocoerciveOp least_squares_gradient(const Matrix& D, const Point& b) {
    Matrix Q = D.transpose() * D;
    Q = 0.5 * (Q + Q.transpose()).eval();
    return CocoerciveOp::quadratic_gradient(std::move(Q), -(D.transpose() * b));
}

}  // namespace

InclusionProblem make_box_lasso(const Matrix& D, const Point& b, double lambda, const Point& lo,
                                const Point& hi) {
    if (D.rows() != b.size()) throw Error(ErrorCode::invalid_input, "box-lasso: D rows must match b");
    const auto d = D.cols();
    require_dim(lo, d, "box-lasso lo");
    return InclusionProblem(MaxMonotoneOp::l1(d, lambda), least_squares_gradient(D, b), MaxMonotoneOp::box(lo, hi));
}

InclusionProblem gen_box_lasso(Eigen::Index d, double density, std::uint64_t seed) {
    require_dimension(d);
    if (!(density > 0.0 && density <= 1.0)) {
        throw Error(ErrorCode::invalid_input, "density must lie in (0, 1]");
    }
    std::mt19937_64 rng(seed);
    const Matrix D = well_conditioned(rng, d);

    Point x_true = Point::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (uniform(rng, 0.0, 1.0) < density) x_true[i] = uniform(rng, 0.5, 2.0);
    }
    if ((x_true.array() == 0.0).all()) {
        x_true[static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(d))] = 1.5;
    }
    Point hi(d);
    for (auto& h : hi) h = uniform(rng, 0.5, 1.5);
    const Point lo = Point::Zero(d);
    const Point b = D * x_true + 0.05 * gaussian_point(rng, d);
    const double lambda = 0.1 * std::max((D.transpose() * b).maxCoeff(), 1e-3);

    InclusionProblem problem = make_box_lasso(D, b, lambda, lo, hi);
    const OracleResult oracle = oracle_solve(problem);
    return problem.with_hint({oracle.x_star, oracle.c_element});
}

InclusionProblem gen_affine_feasibility(Eigen::Index d, std::uint64_t seed) {
    require_dimension(d);
    std::mt19937_64 rng(seed);
    const Point p = gaussian_point(rng, d);
    const Eigen::Index r1 = (d + 1) / 2;
    const Eigen::Index r2 = d - r1;
    const Matrix E1 = gaussian_matrix(rng, r1, d);
    const Matrix E2 = gaussian_matrix(rng, r2, d);
    return InclusionProblem(MaxMonotoneOp::affine_cone(E1, E1 * p), CocoerciveOp::zero(d),
                            MaxMonotoneOp::affine_cone(E2, E2 * p), SolutionHint{p, Point::Zero(d)});
}

InclusionProblem gen_monotone_affine(Eigen::Index d, double skew_fraction, std::uint64_t seed) {
    require_dimension(d);
    if (!(skew_fraction >= 0.0 && skew_fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_input, "skew_fraction must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);

    const Matrix G = gaussian_matrix(rng, d, d);
    Matrix P = G.transpose() * G;
    P = 0.5 * (P + P.transpose()).eval();
    P /= power_iteration_lambda_max(P);
    const Matrix K = gaussian_matrix(rng, d, d);
    Matrix S = K - K.transpose();
    const double s_norm = Eigen::JacobiSVD<Matrix>(S).singularValues()(0);
    if (s_norm > 0.0) S /= s_norm;
    const Matrix M = (1.0 - skew_fraction) * P + skew_fraction * S;
    const Point qa = 0.5 * gaussian_point(rng, d);

    const Matrix D = well_conditioned(rng, d);
    const Point b = 2.0 * gaussian_point(rng, d);
    Point lo(d);
    Point hi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        lo[i] = -uniform(rng, 0.5, 1.5);
        hi[i] = uniform(rng, 0.5, 1.5);
    }

    InclusionProblem problem(MaxMonotoneOp::affine_monotone(M, qa), least_squares_gradient(D, b),
                             MaxMonotoneOp::box(lo, hi));
    const OracleResult oracle = oracle_solve(problem);
    return problem.with_hint({oracle.x_star, oracle.c_element});
}

OracleResult oracle_solve(const InclusionProblem& problem, double tol) {
    if (problem.dim() > 500) throw Error(ErrorCode::invalid_input, "oracle_solve supports d <= 500");
    if (!(tol >= 1e-12)) throw Error(ErrorCode::invalid_input, "oracle tolerance must be >= 1e-12");

    const double gamma = problem.B().beta_is_infinite() ? 1.0 : problem.beta();
    BoundProblem bound(problem, gamma);
    DyState state = dy_init(Point::Zero(problem.dim()));

    OracleResult result;
    std::optional<SolutionHint> long_run;
    for (std::size_t k = 1; k <= oracle_max_iter; ++k) {
        DyState next = dy_step(state, bound);
        if (norm(next.x - next.y) <= tol) {
            // x = J_gC(z) gives z - x in g C x.
            const Point c = (state.z - next.x) / gamma;
            if (certificate_holds(problem, next.x, c)) long_run = SolutionHint{next.x, c};
            result.iterations = k;
            break;
        }
        state = std::move(next);
        result.iterations = k;
    }

    std::optional<SolutionHint> enumerated;
    if (problem.dim() <= 12) {
        enumerated = detail::active_set_certificate(problem, active_set_max_combinations, 1e-10);
        if (enumerated && !certificate_holds(problem, enumerated->x_star, enumerated->c_element)) {
            enumerated.reset();
        }
    }

    if (long_run && enumerated) {
        result.cross_check_gap = norm(long_run->x_star - enumerated->x_star);
        if (result.cross_check_gap > oracle_agreement) {
            throw Error(ErrorCode::oracle_failed,
                        "long run and active-set enumeration disagree by " + std::to_string(result.cross_check_gap));
        }
        result.cross_checked = true;
    }
    const auto& chosen = long_run ? long_run : enumerated;
    if (!chosen) {
        throw Error(ErrorCode::oracle_failed, "no certified solution within tolerance");
    }
    result.x_star = chosen->x_star;
    result.c_element = chosen->c_element;
    return result;
}

}  // namespace fbb
