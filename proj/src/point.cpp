#include "fbb/point.hpp"

#include "fbb/error.hpp"

#include <cmath>
#include <string>

namespace fbb {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::numerical_failure: return "numerical-failure";
        case ErrorCode::divergence_detected: return "divergence-detected";
        case ErrorCode::unsupported_kind: return "unsupported-kind";
        case ErrorCode::precondition_failed: return "precondition-failed";
        case ErrorCode::missing_iterates: return "missing-iterates";
        case ErrorCode::oracle_failed: return "oracle-failed";
        case ErrorCode::parse_error: return "parse-error";
        case ErrorCode::io_error: return "io-error";
    }
    return "unknown";
}

double inner(const Point& u, const Point& v) { return u.dot(v); }

// Shares the summation path of inner() so that |u|^2 - <u,u> is exactly zero.
double norm_sq(const Point& u) { return u.dot(u); }

double norm(const Point& u) { return std::sqrt(norm_sq(u)); }

bool all_finite(const Point& u) { return u.allFinite(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Point& u, std::string_view what) {
    if (!u.allFinite()) {
        throw Error(ErrorCode::invalid_input, std::string(what) + " has non-finite coordinates");
    }
}

void require_dim(const Point& u, Eigen::Index dim, std::string_view what) {
    if (u.size() != dim) {
        throw Error(ErrorCode::invalid_input,
                    std::string(what) + " has dimension " + std::to_string(u.size()) +
                        ", expected " + std::to_string(dim));
    }
}

double polarization_rhs(const Point& x, const Point& y, const Point& z, const Point& w) {
    return norm_sq(x - w) + norm_sq(y - z) - norm_sq(x - z) - norm_sq(y - w);
}

}  // namespace fbb
