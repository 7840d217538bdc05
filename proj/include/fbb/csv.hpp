#pragma once

#include "fbb/certify.hpp"
#include "fbb/splitting.hpp"

#include <iosfwd>
#include <string>

namespace fbb {

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double value);

/// Header: k,res_xy,res_dx,paper_error,phi,wall_ns
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

/// Header: k,phi,rhs_bound,violation
void write_descent_csv(std::ostream& out, const DescentReport& report);

}  // namespace fbb
