#pragma once

#include "fbb/point.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

namespace fbb {

// Closed-form maximal monotone operators, each represented through its
// resolvent J_{gA} = (Id + gA)^{-1}.
namespace monotone {

struct Zero {};

/// Subdifferential of weight * |x|_1.
struct L1 {
    double weight;
};

/// Normal cone of the box {lo <= x <= hi}.
struct Box {
    Point lo;
    Point hi;
};

/// Normal cone of the affine set {x : E x = e}.
struct AffineCone {
    Matrix E;
    Point e;
};

/// Normal cone of {p}.
struct Singleton {
    Point p;
};

/// x -> Q x + q with Q symmetric positive semidefinite.
struct QuadraticGradient {
    Matrix Q;
    Point q;
};

/// x -> M x + q with M + M^T positive semidefinite.
struct AffineMonotone {
    Matrix M;
    Point q;
};

using Kind = std::variant<Zero, L1, Box, AffineCone, Singleton, QuadraticGradient, AffineMonotone>;

}  // namespace monotone

class MaxMonotoneOp {
public:
    static MaxMonotoneOp zero(Eigen::Index dim);
    static MaxMonotoneOp l1(Eigen::Index dim, double weight);
    static MaxMonotoneOp box(Point lo, Point hi);
    static MaxMonotoneOp affine_cone(Matrix E, Point e);
    static MaxMonotoneOp singleton(Point p);
    static MaxMonotoneOp quadratic_gradient(Matrix Q, Point q);
    static MaxMonotoneOp affine_monotone(Matrix M, Point q);

    Eigen::Index dim() const { return dim_; }
    const monotone::Kind& kind() const { return kind_; }
    std::string_view kind_name() const;
    bool is_zero() const { return std::holds_alternative<monotone::Zero>(kind_); }
    /// Normal cones: the resolvent is a projection and does not depend on gamma.
    bool is_normal_cone() const;

    /// True iff u lies in A(x) up to tol (scaled by max(1, |u|_inf) for the
    /// dual part).
    bool graph_member(const Point& x, const Point& u, double tol) const;

private:
    struct AffineProjector {
        Matrix row_basis;  // orthonormal basis of range(E^T)
        Point particular;  // minimum-norm solution of E x = e
    };

    MaxMonotoneOp(Eigen::Index dim, monotone::Kind kind);

    Eigen::Index dim_;
    monotone::Kind kind_;
    std::shared_ptr<const AffineProjector> projector_;

    friend class Resolvent;
};

/// The resolvent J_{gamma A} bound to a fixed stepsize. Linear kinds factor
/// (I + gamma M) once at construction.
class Resolvent {
public:
    Resolvent(const MaxMonotoneOp& op, double gamma);

    Point operator()(const Point& v) const;

    double gamma() const { return gamma_; }
    const MaxMonotoneOp& op() const { return op_; }

private:
    MaxMonotoneOp op_;
    double gamma_;
    std::shared_ptr<const Eigen::PartialPivLU<Matrix>> lu_;
};

Point resolvent_eval(const MaxMonotoneOp& op, double gamma, const Point& v);
bool graph_member(const MaxMonotoneOp& op, const Point& x, const Point& u, double tol);

// Single-valued cocoercive operators with forward evaluation.
namespace cocoercive {

struct Zero {};

struct ScaledIdentity {
    double c;
};

/// x -> Q x + q, Q symmetric positive semidefinite.
struct QuadraticGradient {
    Matrix Q;
    Point q;
};

/// Coordinatewise derivative of the Huber function with quadratic zone
/// [-delta, delta] and unit outer slope: clamp(x / delta, -1, 1).
struct HuberGradient {
    double delta;
};

using Kind = std::variant<Zero, ScaledIdentity, QuadraticGradient, HuberGradient>;

}  // namespace cocoercive

inline constexpr double infinite_beta = std::numeric_limits<double>::infinity();

class CocoerciveOp {
public:
    static CocoerciveOp zero(Eigen::Index dim);
    static CocoerciveOp scaled_identity(Eigen::Index dim, double c);
    /// beta = (1 - 1e-8) / lambda_max(Q), lambda_max by power iteration.
    static CocoerciveOp quadratic_gradient(Matrix Q, Point q);
    static CocoerciveOp huber_gradient(Eigen::Index dim, double delta);

    /// Copy with a caller-declared constant; callers are expected to
    /// validate it with certify_cocoercive.
    CocoerciveOp with_beta(double beta) const;

    Eigen::Index dim() const { return dim_; }
    const cocoercive::Kind& kind() const { return kind_; }
    std::string_view kind_name() const;
    bool is_zero() const { return std::holds_alternative<cocoercive::Zero>(kind_); }

    /// Cocoercivity constant; infinite_beta when B is constant.
    double beta() const { return beta_; }
    bool beta_is_infinite() const { return beta_ == infinite_beta; }

    Point operator()(const Point& x) const;

private:
    CocoerciveOp(Eigen::Index dim, cocoercive::Kind kind, double beta);

    Eigen::Index dim_;
    cocoercive::Kind kind_;
    double beta_;
};

Point forward_eval(const CocoerciveOp& op, const Point& x);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
/// Stops when both the last Rayleigh-quotient increment and the geometric
/// tail estimate are below rel_tol * lambda.
double power_iteration_lambda_max(const Matrix& Q, double rel_tol = 1e-10,
                                  std::size_t max_iter = 1'000'000);

struct SampleReport {
    double max_violation = 0.0;         // raw, max over samples
    double max_scaled_violation = 0.0;  // violation / scale, compared to 1e-10
    bool passed = true;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

inline constexpr double sample_tolerance = 1e-10;

/// Samples Gaussian pairs and reports max of |Ju-Jv|^2 - <u-v, Ju-Jv>.
SampleReport certify_fne(const MaxMonotoneOp& op, double gamma, std::size_t n_samples,
                         std::uint64_t seed);

/// Samples Gaussian pairs and reports max of beta|Bx-By|^2 - <x-y, Bx-By>.
SampleReport certify_cocoercive(const CocoerciveOp& op, std::size_t n_samples,
                                std::uint64_t seed);

}  // namespace fbb
