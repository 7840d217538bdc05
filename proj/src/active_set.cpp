// Exhaustive KKT enumeration for small polyhedral instances.
//
// The inclusion is split into an affine part L x + l (every affine operator
// among A, B, C) and a separable part g(x) = lambda |x|_1 + i_[lo, hi]. Each
// coordinate either sits at a breakpoint of g (lo, 0, hi) or lies inside one
// of the open segments between them, where g is linear. Every combination
// gives a linear system for the free coordinates; the feasible one is the
// solution.

#include "fbb/problems.hpp"

#include "fbb/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fbb {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

enum class Owner { none, A, C };

struct Structure {
    Matrix L;
    Point l;
    double lambda = 0.0;
    Owner l1_owner = Owner::none;
    Point lo;
    Point hi;
    Owner box_owner = Owner::none;
    // affine part contributed by C, needed to split off the c element
    Matrix LC;
    Point lC;
};

bool add_monotone(const MaxMonotoneOp& op, Owner owner, Structure& s) {
    const auto& kind = op.kind();
    if (std::holds_alternative<monotone::Zero>(kind)) return true;
    if (const auto* a = std::get_if<monotone::L1>(&kind)) {
        if (s.l1_owner != Owner::none) return false;
        s.lambda = a->weight;
        s.l1_owner = owner;
        return true;
    }
    const auto set_box = [&](const Point& lo, const Point& hi) {
        if (s.box_owner != Owner::none) return false;
        s.lo = lo;
        s.hi = hi;
        s.box_owner = owner;
        return true;
    };
    if (const auto* b = std::get_if<monotone::Box>(&kind)) return set_box(b->lo, b->hi);
    if (const auto* p = std::get_if<monotone::Singleton>(&kind)) return set_box(p->p, p->p);
    const auto add_affine = [&](const Matrix& M, const Point& q) {
        s.L += M;
        s.l += q;
        if (owner == Owner::C) {
            s.LC = M;
            s.lC = q;
        }
        return true;
    };
    if (const auto* g = std::get_if<monotone::QuadraticGradient>(&kind)) return add_affine(g->Q, g->q);
    if (const auto* g = std::get_if<monotone::AffineMonotone>(&kind)) return add_affine(g->M, g->q);
    return false;  // affine-subspace cones are not separable
}

std::optional<Structure> analyse(const InclusionProblem& problem) {
    const auto d = problem.dim();
    Structure s;
    s.L = Matrix::Zero(d, d);
    s.l = Point::Zero(d);
    s.LC = Matrix::Zero(d, d);
    s.lC = Point::Zero(d);
    s.lo = Point::Constant(d, -inf);
    s.hi = Point::Constant(d, inf);

    const auto& b = problem.B().kind();
    if (const auto* si = std::get_if<cocoercive::ScaledIdentity>(&b)) {
        s.L.diagonal().array() += si->c;
    } else if (const auto* g = std::get_if<cocoercive::QuadraticGradient>(&b)) {
        s.L += g->Q;
        s.l += g->q;
    } else if (!std::holds_alternative<cocoercive::Zero>(b)) {
        return std::nullopt;
    }
    if (!add_monotone(problem.A(), Owner::A, s)) return std::nullopt;
    if (!add_monotone(problem.C(), Owner::C, s)) return std::nullopt;
    return s;
}

// One KKT state of a coordinate: a breakpoint (fixed value) or an open
// segment (free, with the l1 slope on that segment).
struct CoordState {
    bool fixed;
    double value;  // breakpoint when fixed
    double left;
    double right;
    double slope;
};

std::vector<CoordState> coordinate_states(const Structure& s, Eigen::Index i) {
    std::vector<double> points;
    const double lo = s.lo[i];
    const double hi = s.hi[i];
    if (std::isfinite(lo)) points.push_back(lo);
    if (s.l1_owner != Owner::none && s.lambda > 0.0 && lo < 0.0 && 0.0 < hi) points.push_back(0.0);
    if (std::isfinite(hi)) points.push_back(hi);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    std::vector<CoordState> states;
    for (double p : points) states.push_back({true, p, p, p, 0.0});

    std::vector<double> edges;
    edges.push_back(lo);
    for (double p : points) {
        if (p > lo && p < hi) edges.push_back(p);
    }
    edges.push_back(hi);
    const bool with_l1 = s.l1_owner != Owner::none && s.lambda > 0.0;
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        const double left = edges[j];
        const double right = edges[j + 1];
        if (!(left < right)) continue;
        double slope = 0.0;
        if (with_l1) {
            if (right <= 0.0) {
                slope = -s.lambda;
            } else if (left >= 0.0) {
                slope = s.lambda;
            } else {
                continue;  // straddles the kink; 0 is always a breakpoint here
            }
        }
        states.push_back({false, 0.0, left, right, slope});
    }
    return states;
}

// Interval of the l1 subdifferential at v.
std::pair<double, double> l1_interval(const Structure& s, double v) {
    if (s.l1_owner == Owner::none) return {0.0, 0.0};
    if (v == 0.0) return {-s.lambda, s.lambda};
    return v > 0.0 ? std::pair{s.lambda, s.lambda} : std::pair{-s.lambda, -s.lambda};
}

std::pair<double, double> cone_interval(double lo, double hi, double v) {
    return {v == lo ? -inf : 0.0, v == hi ? inf : 0.0};
}

}  // namespace

namespace detail {

std::optional<SolutionHint> active_set_certificate(const InclusionProblem& problem, std::size_t max_combinations,
                                                   double tol) {
    const auto structure = analyse(problem);
    if (!structure) return std::nullopt;
    const Structure& s = *structure;
    const auto d = problem.dim();

    std::vector<std::vector<CoordState>> states(static_cast<std::size_t>(d));
    double combinations = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        states[i] = coordinate_states(s, i);
        combinations *= static_cast<double>(states[i].size());
    }
    if (combinations > static_cast<double>(max_combinations)) return std::nullopt;

    std::vector<std::size_t> choice(static_cast<std::size_t>(d), 0);
    std::vector<Eigen::Index> free_idx;
    free_idx.reserve(d);
    Point x(d);
    Matrix sub;
    Point rhs;

    for (;;) {
        free_idx.clear();
        for (Eigen::Index i = 0; i < d; ++i) {
            const auto& st = states[i][choice[i]];
            if (st.fixed) {
                x[i] = st.value;
            } else {
                x[i] = 0.0;
                free_idx.push_back(i);
            }
        }

        bool ok = true;
        const auto nf = static_cast<Eigen::Index>(free_idx.size());
        if (nf > 0) {
            sub.resize(nf, nf);
            rhs.resize(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                const auto i = free_idx[a];
                double r = -s.l[i] - states[i][choice[i]].slope;
                for (Eigen::Index j = 0; j < d; ++j) {
                    if (states[j][choice[j]].fixed) r -= s.L(i, j) * x[j];
                }
                rhs[a] = r;
                for (Eigen::Index b = 0; b < nf; ++b) sub(a, b) = s.L(i, free_idx[b]);
            }
            Eigen::PartialPivLU<Matrix> lu(sub);
            if (!(lu.rcond() > 1e-13)) {
                ok = false;
            } else {
                const Point xf = lu.solve(rhs);
                for (Eigen::Index a = 0; a < nf && ok; ++a) {
                    const auto i = free_idx[a];
                    const auto& st = states[i][choice[i]];
                    const double slack = tol * std::max(1.0, std::abs(xf[a]));
                    if (xf[a] < st.left - slack || xf[a] > st.right + slack) ok = false;
                    x[i] = xf[a];
                }
            }
        }

        if (ok) {
            const Point g = s.L * x + s.l;
            Point s_l1 = Point::Zero(d);
            Point s_box = Point::Zero(d);
            for (Eigen::Index i = 0; i < d && ok; ++i) {
                const auto& st = states[i][choice[i]];
                if (!st.fixed) {
                    s_l1[i] = st.slope;
                    continue;
                }
                const auto [a1, b1] = l1_interval(s, st.value);
                const auto [a2, b2] = cone_interval(s.lo[i], s.hi[i], st.value);
                const double target = -g[i];
                const double slack = tol * std::max(1.0, std::abs(g[i]));
                if (target < a1 + a2 - slack || target > b1 + b2 + slack) {
                    ok = false;
                    break;
                }
                s_l1[i] = std::clamp(target, a1, b1);
                s_box[i] = target - s_l1[i];
            }
            if (ok) {
                Point c = Point::Zero(d);
                if (s.l1_owner == Owner::C) c += s_l1;
                if (s.box_owner == Owner::C) c += s_box;
                c += s.LC * x + s.lC;
                return SolutionHint{x, c};
            }
        }

        Eigen::Index i = 0;
        while (i < d) {
            if (++choice[i] < states[i].size()) break;
            choice[i] = 0;
            ++i;
        }
        if (i == d) break;
    }
    return std::nullopt;
}

}  // namespace detail

std::optional<Point> active_set_solve(const InclusionProblem& problem, std::size_t max_combinations,
                                      double tol) {
    auto cert = detail::active_set_certificate(problem, max_combinations, tol);
    if (!cert) return std::nullopt;
    return cert->x_star;
}

}  // namespace fbb
