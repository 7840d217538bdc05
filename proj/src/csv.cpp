#include "fbb/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace fbb {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
    out << "k,res_xy,res_dx,paper_error,phi,wall_ns\n";
    for (const auto& row : trace.rows) {
        out << std::to_string(row.k) << ',' << format_number(row.res_xy) << ',' << format_number(row.res_dx) << ','
            << format_number(row.paper_error) << ',';
        if (row.phi) out << format_number(*row.phi);
        out << ',' << std::to_string(row.wall_ns) << '\n';
    }
}

void write_descent_csv(std::ostream& out, const DescentReport& report) {
    out << "k,phi,rhs_bound,violation\n";
    for (const auto& row : report.per_k) {
        out << std::to_string(row.k) << ',' << format_number(row.phi) << ',' << format_number(row.rhs_bound) << ','
            << format_number(row.violation) << '\n';
    }
}

}  // namespace fbb
