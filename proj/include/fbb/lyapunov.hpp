#pragma once

#include "fbb/point.hpp"

namespace fbb {

/// A pair (z*, x*) of the fixed-point set
///   { (z, x) : x = J_{gC}(z - g B x) = J_{gA}(2x - z) }
/// together with the cached forward value B x*.
struct ReferencePoint {
    Point z_star;
    Point x_star;
    Point bx_star;
};

/// phi_k = |z^k - z*|^2 + |y^k - x^k|^2 + 2g(4b/5 - g) |B y^{k-1} - B x*|^2
struct LyapunovValue {
    double phi = 0.0;
    double dist_z_sq = 0.0;
    double residual_sq = 0.0;
    double forward_gap_sq = 0.0;
    double forward_coefficient = 0.0;
    /// gamma >= 4 beta / 5: the third coefficient is negative (value still computed).
    bool coefficient_negative = false;
};

/// Coefficient 2g(4b/5 - g) of the forward-gap term. For infinite beta the
/// forward operator is constant and the term is dropped (coefficient 0).
double lyapunov_forward_coefficient(double gamma, double beta);

LyapunovValue lyapunov(const Point& z, const Point& x, const Point& y, const Point& by_prev,
                       const ReferencePoint& ref, double gamma, double beta);

}  // namespace fbb
