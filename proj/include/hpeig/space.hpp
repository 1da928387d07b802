#pragma once

#include "hpeig/mesh.hpp"
#include "hpeig/shape.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hpeig {

/// Continuous piecewise polynomials with per-element degree on a mesh.
///
/// Edge modes follow the minimum rule: an edge carries modes up to the smallest
/// degree of its adjacent elements. Dofs on Dirichlet vertices and edges are
/// eliminated; their local-to-global entry is -1.
///
/// Global numbering: free vertices by id, then edge modes by edge id, then
/// interior modes by element id.
class Space {
public:
  Space(std::shared_ptr<const Mesh> mesh, std::vector<int> degrees);

  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }
  [[nodiscard]] const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  [[nodiscard]] int num_dofs() const { return num_dofs_; }
  [[nodiscard]] int degree(int k) const { return degrees_[k]; }
  [[nodiscard]] std::span<const int> degrees() const { return degrees_; }
  [[nodiscard]] int max_degree() const;
  [[nodiscard]] const ShapeLayout& layout(int k) const { return layouts_[k]; }
  /// Local-to-global map of element k in local shape order (-1 = constrained).
  [[nodiscard]] std::span<const int> dofs(int k) const;

  /// Degree used for continuity on edge e (minimum of adjacent degrees).
  [[nodiscard]] int conforming_edge_degree(int e) const { return edge_degree_[e]; }
  /// Largest degree of the elements adjacent to edge e.
  [[nodiscard]] int max_edge_degree(int e) const;

  [[nodiscard]] bool vertex_constrained(int v) const { return vertex_dof_[v] < 0; }
  [[nodiscard]] int vertex_dof(int v) const { return vertex_dof_[v]; }
  /// First global dof of edge e's modes (-1 if constrained or none).
  [[nodiscard]] int edge_dof(int e) const { return edge_dof_[e]; }

  /// Coefficients of element k in local order; constrained entries are zero.
  [[nodiscard]] Eigen::VectorXd local_coefficients(int k, const Eigen::VectorXd& global) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<int> degrees_;
  std::vector<ShapeLayout> layouts_;
  std::vector<int> edge_degree_;
  std::vector<int> vertex_dof_;
  std::vector<int> edge_dof_;
  std::vector<int> dof_offsets_;
  std::vector<int> dof_table_;
  int num_dofs_ = 0;
};

/// Function given element-wise: f(element, physical point). The element lets
/// callers resolve which side of a slit a point belongs to.
using ElementFunction = std::function<double(int, const Point&)>;

/// Values and optional derivatives of a discrete function at reference points of element k.
ShapeTable eval_function(const Space& space, const Eigen::VectorXd& coeffs, int k,
                         std::span<const double> xs, std::span<const double> ys,
                         Derivatives derivs = Derivatives::Gradients);

double eval_at(const Space& space, const Eigen::VectorXd& coeffs, int k, const Point& p);

/// Projection-based interpolation: vertex values, then H1-seminorm projection of
/// the remainder onto edge modes and interior modes. Needs only values of f.
/// Reproduces members of the space exactly.
Eigen::VectorXd interpolate(const Space& space, const ElementFunction& f);
Eigen::VectorXd interpolate(const Space& space, const std::function<double(const Point&)>& f);

/// Transfer a function from `coarse` to `fine`, where `parent[k]` is the coarse
/// element containing fine element k. Exact when the spaces are nested.
Eigen::VectorXd prolong(const Space& coarse, const Eigen::VectorXd& coeffs, const Space& fine,
                        std::span<const int> parent);

} // namespace hpeig
