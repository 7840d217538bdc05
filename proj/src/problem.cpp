#include "fbb/problem.hpp"

#include "fbb/error.hpp"

namespace fbb {

InclusionProblem::InclusionProblem(MaxMonotoneOp A, CocoerciveOp B, MaxMonotoneOp C,
                                   std::optional<SolutionHint> hint)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), hint_(std::move(hint)) {
    if (A_.dim() != B_.dim() || A_.dim() != C_.dim()) {
        throw Error(ErrorCode::invalid_input, "operators A, B, C have different dimensions");
    }
    if (hint_) {
        require_dim(hint_->x_star, dim(), "solution hint x_star");
        require_dim(hint_->c_element, dim(), "solution hint c_element");
        if (!certificate_holds(*this, hint_->x_star, hint_->c_element)) {
            throw Error(ErrorCode::invalid_input, "solution hint fails the zero-inclusion certificate");
        }
    }
}

InclusionProblem InclusionProblem::with_hint(SolutionHint hint) const {
    return InclusionProblem(A_, B_, C_, std::move(hint));
}

InclusionProblem InclusionProblem::zero(Eigen::Index dim) {
    return InclusionProblem(MaxMonotoneOp::zero(dim), CocoerciveOp::zero(dim), MaxMonotoneOp::zero(dim),
                            SolutionHint{Point::Zero(dim), Point::Zero(dim)});
}

bool certificate_holds(const InclusionProblem& problem, const Point& x_star, const Point& c_element,
                       double tol) {
    if (!x_star.allFinite() || !c_element.allFinite()) return false;
    const Point a_element = -c_element - problem.B()(x_star);
    return problem.C().graph_member(x_star, c_element, tol) &&
           problem.A().graph_member(x_star, a_element, tol);
}

}  // namespace fbb
