#pragma once

#include "hpeig/space.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace hpeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Constant coefficients of B(w, v) = ∫ A∇w·∇v + c w v on one region.
struct Material {
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
  double c = 0.0;
};

/// Materials indexed by element region tag.
struct Coefficients {
  std::vector<Material> regions{Material{}};

  /// Throws ArgumentError if A is not symmetric positive definite or c < 0.
  void validate() const;
  [[nodiscard]] const Material& at(int region) const;
};

/// Element matrices in local shape order, symmetric to the last bit.
Eigen::MatrixXd local_stiffness(const ElementMap& map, const ShapeLayout& layout, const Material& mat);
Eigen::MatrixXd local_mass(const ElementMap& map, const ShapeLayout& layout);

/// Stiffness matrix of B on the free dofs.
SparseMatrix assemble_stiffness(const Space& space, const Coefficients& coeffs);
/// L2 mass matrix on the free dofs.
SparseMatrix assemble_mass(const Space& space);

/// Load vector (f, v_j) for a discrete f in the same space.
Eigen::VectorXd assemble_load(const Space& space, const Eigen::VectorXd& f);
/// Load vector (f, v_j) for an element-wise function, integrated with `extra_degree`
/// beyond the exact polynomial order.
Eigen::VectorXd assemble_load(const Space& space, const ElementFunction& f, int extra_degree = 6);

/// Energy |||v|||^2 computed element by element with quadrature (independent of the matrices).
double energy_norm_squared(const Space& space, const Coefficients& coeffs, const Eigen::VectorXd& v);

} // namespace hpeig
