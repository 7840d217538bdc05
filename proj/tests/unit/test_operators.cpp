#include "doctest.h"

#include "fbb/error.hpp"
#include "fbb/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

using namespace fbb;

namespace {

Point vec(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// One instance of every monotone kind in dimension 3.
std::vector<MaxMonotoneOp> monotone_zoo() {
    Matrix E(1, 3);
    E << 1.0, -2.0, 0.5;
    Matrix Q(3, 3);
    Q << 2, 1, 0, 1, 2, 0, 0, 0, 0;
    Matrix M(3, 3);
    M << 1, 2, 0, -2, 0.5, 1, 0, -1, 0;
    return {
        MaxMonotoneOp::zero(3),
        MaxMonotoneOp::l1(3, 0.7),
        MaxMonotoneOp::box(vec({-1, 0, 2}), vec({1, 0.5, 3})),
        MaxMonotoneOp::affine_cone(E, vec({0.3})),
        MaxMonotoneOp::singleton(vec({1, -1, 2})),
        MaxMonotoneOp::quadratic_gradient(Q, vec({0.1, -0.2, 0.3})),
        MaxMonotoneOp::affine_monotone(M, vec({1, 0, -1})),
    };
}

std::vector<CocoerciveOp> cocoercive_zoo() {
    Matrix Q(3, 3);
    Q << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    return {
        CocoerciveOp::zero(3),
        CocoerciveOp::scaled_identity(3, 2.5),
        CocoerciveOp::quadratic_gradient(Q, vec({1, 0, -1})),
        CocoerciveOp::huber_gradient(3, 0.4),
    };
}

}  // namespace

TEST_CASE("resolvent closed forms") {
    CHECK((resolvent_eval(MaxMonotoneOp::zero(2), 0.3, vec({1.5, -2})) - vec({1.5, -2})).norm() == 0.0);
    CHECK((resolvent_eval(MaxMonotoneOp::l1(3, 1.0), 1.0, vec({3, -0.5, 0})) - vec({2, 0, 0})).norm() <= 1e-15);
    Matrix Q(1, 1);
    Q << 2.0;
    const Point y = resolvent_eval(MaxMonotoneOp::quadratic_gradient(Q, vec({0})), 0.5, vec({3}));
    CHECK(y[0] == doctest::Approx(1.5).epsilon(1e-15));

    const Point p = resolvent_eval(MaxMonotoneOp::box(vec({0, 0}), vec({1, 1})), 2.0, vec({-3, 0.25}));
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.25);
}

TEST_CASE("forward evaluations") {
    CHECK(forward_eval(CocoerciveOp::zero(2), vec({7, 7})).norm() == 0.0);
    CHECK(forward_eval(CocoerciveOp::scaled_identity(1, 1.0), vec({0.4}))[0] == 0.4);
    const Point bx = forward_eval(CocoerciveOp::quadratic_gradient(mat2(2, 0, 0, 1), vec({1, 0})), vec({1, 1}));
    CHECK(bx[0] == 3.0);
    CHECK(bx[1] == 1.0);
    const Point h = forward_eval(CocoerciveOp::huber_gradient(3, 0.5), vec({0.25, 3, -3}));
    CHECK(h[0] == doctest::Approx(0.5));
    CHECK(h[1] == 1.0);
    CHECK(h[2] == -1.0);
}

TEST_CASE("declared cocoercivity constants") {
    CHECK(CocoerciveOp::zero(2).beta_is_infinite());
    CHECK(CocoerciveOp::scaled_identity(2, 4.0).beta() == 0.25);
    CHECK(CocoerciveOp::huber_gradient(2, 0.3).beta() == 0.3);
    const double b = CocoerciveOp::quadratic_gradient(mat2(2, 0, 0, 1), vec({0, 0})).beta();
    CHECK(b <= 0.5);
    CHECK(b == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(CocoerciveOp::quadratic_gradient(Matrix::Zero(2, 2), vec({1, 1})).beta_is_infinite());
}

TEST_CASE("graph membership") {
    const auto l1 = MaxMonotoneOp::l1(1, 1.0);
    CHECK(graph_member(l1, vec({0}), vec({0.7}), 1e-12));
    CHECK(graph_member(l1, vec({2}), vec({1}), 1e-12));
    CHECK_FALSE(graph_member(l1, vec({2}), vec({0.5}), 1e-12));
    CHECK_FALSE(graph_member(l1, vec({0}), vec({1.5}), 1e-12));

    const auto box = MaxMonotoneOp::box(vec({0}), vec({1}));
    CHECK_FALSE(graph_member(box, vec({1}), vec({-0.1}), 1e-12));
    CHECK(graph_member(box, vec({1}), vec({5}), 1e-12));
    CHECK(graph_member(box, vec({0.5}), vec({0}), 1e-12));
    CHECK_FALSE(graph_member(box, vec({1.5}), vec({0}), 1e-12));

    const auto single = MaxMonotoneOp::singleton(vec({1, 2}));
    CHECK(graph_member(single, vec({1, 2}), vec({-40, 3}), 1e-12));
    CHECK_FALSE(graph_member(single, vec({1, 2.1}), vec({0, 0}), 1e-12));
}

TEST_CASE("constructors reject bad data") {
    CHECK_THROWS_AS(MaxMonotoneOp::l1(2, -1.0), Error);
    CHECK_THROWS_AS(MaxMonotoneOp::box(vec({1}), vec({0})), Error);
    CHECK_THROWS_AS(MaxMonotoneOp::quadratic_gradient(mat2(1, 0, 0, -1), vec({0, 0})), Error);
    CHECK_THROWS_AS(MaxMonotoneOp::quadratic_gradient(mat2(1, 1, 0, 1), vec({0, 0})), Error);
    CHECK_THROWS_AS(MaxMonotoneOp::affine_monotone(mat2(-1, 0, 0, 1), vec({0, 0})), Error);
    CHECK_THROWS_AS(CocoerciveOp::scaled_identity(2, -1.0), Error);
    CHECK_THROWS_AS(CocoerciveOp::huber_gradient(2, 0.0), Error);
    Matrix E(2, 2);
    E << 1, 1, 2, 2;
    CHECK_THROWS_AS(MaxMonotoneOp::affine_cone(E, vec({1, 3})), Error);
}

TEST_CASE("pure skew affine operator has a well-posed resolvent") {
    const auto op = MaxMonotoneOp::affine_monotone(mat2(0, 3, -3, 0), vec({0, 0}));
    const Point v = vec({1, 2});
    const double g = 0.7;
    const Point y = resolvent_eval(op, g, v);
    CHECK(graph_member(op, y, (v - y) / g, 1e-10));
}

TEST_CASE("resolvent identity for every kind and random stepsizes") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gamma_dist(1e-3, 10.0);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (const auto& op : monotone_zoo()) {
        CAPTURE(op.kind_name());
        for (int t = 0; t < 200; ++t) {
            const double g = gamma_dist(rng);
            Point v(3);
            for (auto& c : v) c = gauss(rng);
            const Point y = resolvent_eval(op, g, v);
            REQUIRE(graph_member(op, y, (v - y) / g, 1e-8));
        }
    }
}

TEST_CASE("normal cone resolvents are idempotent") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 4.0);
    for (const auto& op : monotone_zoo()) {
        if (!op.is_normal_cone()) continue;
        CAPTURE(op.kind_name());
        const Resolvent J(op, 1.3);
        for (int t = 0; t < 200; ++t) {
            Point v(3);
            for (auto& c : v) c = gauss(rng);
            const Point p = J(v);
            REQUIRE((J(p) - p).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("firm nonexpansiveness of resolvents") {
    for (const auto& op : monotone_zoo()) {
        CAPTURE(op.kind_name());
        for (double g : {0.1, 1.0, 7.5}) {
            const SampleReport r = certify_fne(op, g, 1000, 99);
            CHECK(r.passed);
            CHECK(r.samples == 1000);
            CHECK(r.seed == 99);
            CHECK(r.max_scaled_violation <= sample_tolerance);
            if (op.is_zero()) CHECK(r.max_violation == 0.0);
        }
    }
    const SampleReport l1 = certify_fne(MaxMonotoneOp::l1(4, 1.0), 1.0, 1000, 1);
    CHECK(l1.max_violation <= 1e-10);
}

TEST_CASE("cocoercivity of forward operators") {
    for (const auto& op : cocoercive_zoo()) {
        CAPTURE(op.kind_name());
        const SampleReport r = certify_cocoercive(op, 1000, 42);
        CHECK(r.passed);
        CHECK(r.max_scaled_violation <= sample_tolerance);
    }
    CHECK(certify_cocoercive(CocoerciveOp::zero(2), 1000, 3).max_violation == 0.0);
    CHECK(certify_cocoercive(CocoerciveOp::scaled_identity(2, 1.0), 1000, 3).max_violation <= 0.0);

    // An optimistic declared constant must be caught.
    const auto optimistic = CocoerciveOp::scaled_identity(2, 1.0).with_beta(2.0);
    CHECK_FALSE(certify_cocoercive(optimistic, 1000, 3).passed);
}

TEST_CASE("sampling is reproducible from the seed") {
    const auto op = MaxMonotoneOp::l1(3, 0.5);
    const SampleReport a = certify_fne(op, 0.8, 500, 17);
    const SampleReport b = certify_fne(op, 0.8, 500, 17);
    CHECK(a.max_violation == b.max_violation);
    CHECK(a.max_scaled_violation == b.max_scaled_violation);
}

TEST_CASE("polarization identity") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    for (int t = 0; t < 500; ++t) {
        Point x(6), y(6), z(6), w(6);
        for (Point* p : {&x, &y, &z, &w}) {
            for (auto& c : *p) c = gauss(rng);
        }
        const double lhs = 2.0 * inner(x - y, z - w);
        const double rhs = polarization_rhs(x, y, z, w);
        const double scale = norm_sq(x - w) + norm_sq(y - z) + norm_sq(x - z) + norm_sq(y - w);
        REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, scale));
    }
}

TEST_CASE("power iteration matches a dense eigensolver") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss;
    for (Eigen::Index d = 1; d <= 20; ++d) {
        Matrix G(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) G(i, j) = gauss(rng);
        }
        const Matrix Q = G.transpose() * G;
        const double exact = Eigen::SelfAdjointEigenSolver<Matrix>(Q).eigenvalues().maxCoeff();
        const double approx = power_iteration_lambda_max(Q);
        CAPTURE(d);
        CHECK(std::abs(approx - exact) <= 1e-8 * exact);
    }
}
