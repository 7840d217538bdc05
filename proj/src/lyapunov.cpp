#include "fbb/lyapunov.hpp"

#include "fbb/error.hpp"

#include <cmath>

namespace fbb {

double lyapunov_forward_coefficient(double gamma, double beta) {
    if (std::isinf(beta)) return 0.0;
    return 2.0 * gamma * (0.8 * beta - gamma);
}

LyapunovValue lyapunov(const Point& z, const Point& x, const Point& y, const Point& by_prev,
                       const ReferencePoint& ref, double gamma, double beta) {
    if (!(gamma > 0.0)) throw Error(ErrorCode::invalid_input, "lyapunov: gamma must be > 0");
    if (!(beta > 0.0)) throw Error(ErrorCode::invalid_input, "lyapunov: beta must be > 0");
    const auto d = ref.x_star.size();
    require_dim(z, d, "lyapunov z");
    require_dim(x, d, "lyapunov x");
    require_dim(y, d, "lyapunov y");
    require_dim(by_prev, d, "lyapunov By_prev");

    LyapunovValue v;
    v.dist_z_sq = norm_sq(z - ref.z_star);
    v.residual_sq = norm_sq(y - x);
    v.forward_gap_sq = norm_sq(by_prev - ref.bx_star);
    v.forward_coefficient = lyapunov_forward_coefficient(gamma, beta);
    v.coefficient_negative = v.forward_coefficient < 0.0;
    v.phi = v.dist_z_sq + v.residual_sq + v.forward_coefficient * v.forward_gap_sq;
    return v;
}

}  // namespace fbb
