#pragma once

#include "hpeig/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>

namespace hpeig {

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet {
  double v = 0.0;
  double dx = 0.0, dy = 0.0;
  double dxx = 0.0, dxy = 0.0, dyy = 0.0;
};

Jet operator*(const Jet& f, const Jet& g);

/// Legendre polynomials P_0..P_n and their first two derivatives at t.
struct LegendreTable {
  std::vector<double> p, dp, d2p;
};
LegendreTable legendre_table(int n, double t);

/// Affine map from the reference triangle (0,0),(1,0),(0,1) onto an element.
struct ElementMap {
  std::array<Point, 3> vertices{};
  std::array<std::array<double, 2>, 3> grad_lambda{};  ///< physical gradients of barycentrics
  double area = 0.0;

  [[nodiscard]] Point to_physical(double x, double y) const;
  /// Reference coordinates (lambda_1, lambda_2) of a physical point.
  [[nodiscard]] std::array<double, 2> to_reference(const Point& p) const;
};

ElementMap element_map(const Mesh& mesh, int k);

/// Which hierarchical shape functions an element carries.
///
/// Local ordering: 3 vertex functions, then the modes of local edges 0, 1, 2
/// (orders 2..edge_degree[j]), then interior bubbles ordered by total degree.
struct ShapeLayout {
  int degree = 1;
  std::array<int, 3> edge_degree{1, 1, 1};
  /// Local edge j runs from local vertex j+1 to j+2; reversed when that
  /// disagrees with the global orientation (lower to higher vertex id).
  std::array<bool, 3> edge_reversed{false, false, false};

  [[nodiscard]] int num_edge_modes(int j) const { return edge_degree[j] - 1; }
  [[nodiscard]] int num_bubbles() const { return (degree - 1) * (degree - 2) / 2; }
  [[nodiscard]] int size() const
  {
    return 3 + num_edge_modes(0) + num_edge_modes(1) + num_edge_modes(2) + num_bubbles();
  }
  /// Offset of the first mode of local edge j in the local ordering.
  [[nodiscard]] int edge_offset(int j) const;
  [[nodiscard]] int bubble_offset() const { return edge_offset(3); }
};

/// Layout of the full P_p space with unreversed edges.
ShapeLayout full_layout(int degree);

enum class Derivatives { Values = 0, Gradients = 1, Hessians = 2 };

/// Shape function tables: rows are points, columns are local shape functions.
/// Derivatives are with respect to physical coordinates.
struct ShapeTable {
  Eigen::MatrixXd val, dx, dy, dxx, dxy, dyy;
};

/// Evaluate all shape functions of `layout` at reference points (xs[i], ys[i]).
ShapeTable eval_shapes(const ElementMap& map, const ShapeLayout& layout, std::span<const double> xs,
                       std::span<const double> ys, Derivatives derivs = Derivatives::Gradients);

/// Values and physical gradients of all local shape functions at one reference point.
struct PointShapes {
  Eigen::VectorXd values;
  Eigen::MatrixXd gradients;  ///< size() x 2
};
PointShapes eval_basis(const ElementMap& map, const ShapeLayout& layout, double x, double y);

} // namespace hpeig
