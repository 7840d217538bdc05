#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace fbb {

/// A point of the finite-dimensional Hilbert space R^d with the Euclidean
/// inner product.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

double inner(const Point& u, const Point& v);
double norm_sq(const Point& u);
double norm(const Point& u);

bool all_finite(const Point& u);
bool all_finite(const Matrix& m);

/// Throws invalid_input unless every coordinate is finite.
void require_finite(const Point& u, std::string_view what);
/// Throws invalid_input unless dim(u) == dim.
void require_dim(const Point& u, Eigen::Index dim, std::string_view what);

/// Right-hand side of 2<x-y, z-w> = |x-w|^2 + |y-z|^2 - |x-z|^2 - |y-w|^2.
double polarization_rhs(const Point& x, const Point& y, const Point& z, const Point& w);

}  // namespace fbb
