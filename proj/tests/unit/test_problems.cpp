#include "doctest.h"

#include "fbb/error.hpp"
#include "fbb/problems.hpp"
#include "fbb/splitting.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace fbb;

namespace {

Point scalar(double v) { return Point::Constant(1, v); }

bool same(const MaxMonotoneOp& a, const MaxMonotoneOp& b) {
    if (a.kind_name() != b.kind_name()) return false;
    const Point v = Point::LinSpaced(a.dim(), -2.0, 3.0);
    return (resolvent_eval(a, 0.7, v) - resolvent_eval(b, 0.7, v)).norm() == 0.0;
}

}  // namespace

TEST_CASE("one-dimensional box-lasso by hand") {
    Matrix D(1, 1);
    D << 1.0;
    const auto p = make_box_lasso(D, scalar(2), 0.5, scalar(0), scalar(1));
    const OracleResult o = oracle_solve(p);
    CHECK(std::abs(o.x_star[0] - 1.0) <= 1e-10);
    CHECK(std::abs(o.c_element[0] - 0.5) <= 1e-10);
    CHECK(o.cross_checked);

    const auto enumerated = active_set_solve(p);
    REQUIRE(enumerated.has_value());
    CHECK(std::abs((*enumerated)[0] - 1.0) <= 1e-12);
}

TEST_CASE("zero problem oracle") {
    const OracleResult o = oracle_solve(InclusionProblem::zero(3));
    CHECK(o.x_star.norm() == 0.0);
    CHECK(o.c_element.norm() == 0.0);
}

TEST_CASE("generators are reproducible") {
    const auto a = gen_box_lasso(7, 1.0, 5);
    const auto b = gen_box_lasso(7, 1.0, 5);
    CHECK(a.beta() == b.beta());
    CHECK(same(a.A(), b.A()));
    CHECK(same(a.C(), b.C()));
    CHECK(a.solution_hint()->x_star == b.solution_hint()->x_star);
    const Point v = Point::LinSpaced(7, -1.0, 1.0);
    CHECK(a.B()(v) == b.B()(v));
    CHECK_FALSE(gen_box_lasso(7, 1.0, 6).solution_hint()->x_star == a.solution_hint()->x_star);

    const auto m1 = gen_monotone_affine(5, 0.3, 2);
    const auto m2 = gen_monotone_affine(5, 0.3, 2);
    CHECK(same(m1.A(), m2.A()));
    CHECK(m1.solution_hint()->x_star == m2.solution_hint()->x_star);
}

TEST_CASE("generated beta matches a dense eigensolver") {
    for (Eigen::Index d : {2, 5, 12, 20}) {
        const auto p = gen_box_lasso(d, 0.5, static_cast<std::uint64_t>(d));
        const auto& g = std::get<cocoercive::QuadraticGradient>(p.B().kind());
        const double lmax = Eigen::SelfAdjointEigenSolver<Matrix>(g.Q).eigenvalues().maxCoeff();
        CHECK(p.beta() <= 1.0 / lmax);
        CHECK(p.beta() == doctest::Approx(1.0 / lmax).epsilon(1e-7));
        CHECK(certify_cocoercive(p.B(), 1000, 1).passed);
    }
}

TEST_CASE("generated hints are certificates") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        for (const auto& p : {gen_box_lasso(9, 0.3, seed), gen_monotone_affine(9, 0.6, seed),
                              gen_affine_feasibility(9, seed)}) {
            const auto& h = *p.solution_hint();
            CHECK(certificate_holds(p, h.x_star, h.c_element));
        }
    }
}

TEST_CASE("random d = 8 box-lasso: long run and enumeration agree") {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const auto p = gen_box_lasso(8, 0.5, seed);
        const OracleResult o = oracle_solve(p);
        CHECK(o.cross_checked);
        CHECK(o.cross_check_gap <= 1e-8);
        const auto enumerated = active_set_solve(p);
        REQUIRE(enumerated.has_value());
        CHECK((*enumerated - o.x_star).norm() <= 1e-8);
    }
}

TEST_CASE("monotone-affine instances are cross-checked too") {
    const auto p = gen_monotone_affine(6, 0.5, 3);
    const OracleResult o = oracle_solve(p);
    CHECK(o.cross_checked);
    CHECK(o.cross_check_gap <= 1e-8);
}

TEST_CASE("two lines crossing at a planted point") {
    const auto p = gen_affine_feasibility(2, 4);
    const Point planted = p.solution_hint()->x_star;
    SolverConfig c;
    c.method = Method::dr;
    c.gamma = 1.0;
    c.tol = 1e-13;
    c.max_iter = 100000;
    c.stop_rule = StopRule::absolute;
    const SolverTrace t = run(p, c);
    CHECK(t.converged);
    CHECK((t.x_final - planted).norm() <= 1e-9);
}

TEST_CASE("identical and orthogonal subspaces") {
    Matrix E(1, 2);
    E << 1.0, -1.0;
    const InclusionProblem same_line(MaxMonotoneOp::affine_cone(E, scalar(0)), CocoerciveOp::zero(2),
                                     MaxMonotoneOp::affine_cone(E, scalar(0)));
    SolverConfig c;
    c.method = Method::dr;
    c.gamma = 1.0;
    c.stop_rule = StopRule::absolute;
    c.tol = 1e-12;
    InitPoints init;
    init.z0 = Point(2);
    *init.z0 << 3.0, 1.0;
    const SolverTrace t = run(same_line, c, init);
    CHECK(t.converged);
    CHECK(std::abs(t.x_final[0] - t.x_final[1]) <= 1e-12);

    Matrix E1(1, 2), E2(1, 2);
    E1 << 1.0, 0.0;
    E2 << 0.0, 1.0;
    const InclusionProblem cross(MaxMonotoneOp::affine_cone(E1, scalar(0)), CocoerciveOp::zero(2),
                                 MaxMonotoneOp::affine_cone(E2, scalar(0)));
    const SolverTrace u = run(cross, c, init);
    CHECK(u.converged);
    CHECK(u.x_final.norm() <= 1e-12);
}

TEST_CASE("skew fraction extremes") {
    const auto sym = gen_monotone_affine(4, 0.0, 1);
    const auto& a = std::get<monotone::AffineMonotone>(sym.A().kind());
    CHECK((a.M - a.M.transpose()).cwiseAbs().maxCoeff() <= 1e-15);

    const auto skew = gen_monotone_affine(2, 1.0, 1);
    const auto& s = std::get<monotone::AffineMonotone>(skew.A().kind());
    CHECK((s.M + s.M.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    for (double g : {0.1, 1.0, 10.0}) {
        const Matrix I = Matrix::Identity(2, 2);
        CHECK((I + g * s.M).determinant() == doctest::Approx(1.0 + g * g * s.M(0, 1) * s.M(0, 1)));
    }
}

TEST_CASE("generator arguments are validated") {
    CHECK_THROWS_AS(gen_box_lasso(0, 0.5, 1), Error);
    CHECK_THROWS_AS(gen_box_lasso(3, 0.0, 1), Error);
    CHECK_THROWS_AS(gen_monotone_affine(3, 1.5, 1), Error);
    CHECK_THROWS_AS(oracle_solve(InclusionProblem::zero(2), 1e-14), Error);
}
