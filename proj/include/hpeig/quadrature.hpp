#pragma once

#include <vector>

namespace hpeig {

/// Gauss–Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Rule on the reference triangle {(x, y): x, y >= 0, x + y <= 1}; weights sum to 1/2.
struct TriangleRule {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weights;
  [[nodiscard]] int size() const { return static_cast<int>(weights.size()); }
};

/// n-point Gauss–Legendre rule on [0, 1] (exact to degree 2n - 1). Cached, thread safe.
const LineRule& gauss_line(int n);

/// Smallest Gauss–Legendre rule on [0, 1] exact for polynomials of the given degree.
const LineRule& line_rule_for_degree(int degree);

/// Collapsed-coordinate Gauss rule on the reference triangle exact to the given total degree.
const TriangleRule& triangle_rule(int degree);

} // namespace hpeig
