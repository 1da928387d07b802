#include "hpeig/assembly.hpp"

#include "hpeig/error.hpp"
#include "hpeig/quadrature.hpp"

#include <cmath>
#include <string>

namespace hpeig {

void Coefficients::validate() const
{
  if (regions.empty())
    throw ArgumentError("coefficients: no regions");
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& m = regions[r];
    const auto& A = m.A;
    if (!A.allFinite() || !std::isfinite(m.c))
      throw ArgumentError("coefficients: non-finite value in region " + std::to_string(r));
    if (A(0, 1) != A(1, 0))
      throw ArgumentError("coefficients: A is not symmetric in region " + std::to_string(r));
    if (A(0, 0) <= 0.0 || A.determinant() <= 0.0)
      throw ArgumentError("coefficients: A is not positive definite in region " + std::to_string(r));
    if (m.c < 0.0)
      throw ArgumentError("coefficients: negative reaction coefficient in region " + std::to_string(r));
  }
}

const Material& Coefficients::at(int region) const
{
  if (region < 0 || region >= static_cast<int>(regions.size()))
    throw ArgumentError("coefficients: no material for region " + std::to_string(region));
  return regions[region];
}

Eigen::MatrixXd local_stiffness(const ElementMap& map, const ShapeLayout& layout, const Material& mat)
{
  const auto& rule = triangle_rule(2 * layout.degree);
  const ShapeTable t = eval_shapes(map, layout, rule.x, rule.y, Derivatives::Gradients);
  const double jac = 2.0 * map.area;
  Eigen::VectorXd w(rule.size());
  for (int q = 0; q < rule.size(); ++q)
    w[q] = rule.weights[q] * jac;
  const auto W = w.asDiagonal();
  const auto& A = mat.A;
  Eigen::MatrixXd K = A(0, 0) * (t.dx.transpose() * W * t.dx) +
                      A(1, 1) * (t.dy.transpose() * W * t.dy) +
                      A(0, 1) * (t.dx.transpose() * W * t.dy + t.dy.transpose() * W * t.dx);
  if (mat.c != 0.0)
    K += mat.c * (t.val.transpose() * W * t.val);
  return 0.5 * (K + K.transpose());
}

Eigen::MatrixXd local_mass(const ElementMap& map, const ShapeLayout& layout)
{
  const auto& rule = triangle_rule(2 * layout.degree);
  const ShapeTable t = eval_shapes(map, layout, rule.x, rule.y, Derivatives::Values);
  Eigen::VectorXd w(rule.size());
  for (int q = 0; q < rule.size(); ++q)
    w[q] = rule.weights[q] * 2.0 * map.area;
  Eigen::MatrixXd M = t.val.transpose() * w.asDiagonal() * t.val;
  return 0.5 * (M + M.transpose());
}

namespace {

template <class Local>
SparseMatrix assemble(const Space& space, Local&& local)
{
  const Mesh& mesh = space.mesh();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::MatrixXd K = local(k, element_map(mesh, k));
    const auto dofs = space.dofs(k);
    for (std::size_t i = 0; i < dofs.size(); ++i) {
      if (dofs[i] < 0)
        continue;
      for (std::size_t j = 0; j < dofs.size(); ++j)
        if (dofs[j] >= 0)
          triplets.emplace_back(dofs[i], dofs[j], K(i, j));
    }
  }
  SparseMatrix S(space.num_dofs(), space.num_dofs());
  S.setFromTriplets(triplets.begin(), triplets.end());
  S.makeCompressed();
  return S;
}

} // namespace

SparseMatrix assemble_stiffness(const Space& space, const Coefficients& coeffs)
{
  coeffs.validate();
  return assemble(space, [&](int k, const ElementMap& map) {
    return local_stiffness(map, space.layout(k), coeffs.at(space.mesh().element(k).region));
  });
}

SparseMatrix assemble_mass(const Space& space)
{
  return assemble(space,
                  [&](int k, const ElementMap& map) { return local_mass(map, space.layout(k)); });
}

Eigen::VectorXd assemble_load(const Space& space, const Eigen::VectorXd& f)
{
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd local =
        local_mass(element_map(mesh, k), space.layout(k)) * space.local_coefficients(k, f);
    const auto dofs = space.dofs(k);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0)
        b[dofs[i]] += local[i];
  }
  return b;
}

Eigen::VectorXd assemble_load(const Space& space, const ElementFunction& f, int extra_degree)
{
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto map = element_map(mesh, k);
    const auto& rule = triangle_rule(2 * space.degree(k) + extra_degree);
    const ShapeTable t = eval_shapes(map, space.layout(k), rule.x, rule.y, Derivatives::Values);
    Eigen::VectorXd fw(rule.size());
    for (int q = 0; q < rule.size(); ++q)
      fw[q] = rule.weights[q] * 2.0 * map.area * f(k, map.to_physical(rule.x[q], rule.y[q]));
    const Eigen::VectorXd local = t.val.transpose() * fw;
    const auto dofs = space.dofs(k);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0)
        b[dofs[i]] += local[i];
  }
  return b;
}

double energy_norm_squared(const Space& space, const Coefficients& coeffs, const Eigen::VectorXd& v)
{
  const Mesh& mesh = space.mesh();
  double total = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& mat = coeffs.at(mesh.element(k).region);
    const auto& rule = triangle_rule(2 * space.degree(k) + 2);
    const ShapeTable f = eval_function(space, v, k, rule.x, rule.y, Derivatives::Gradients);
    const double jac = 2.0 * element_map(mesh, k).area;
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d g(f.dx(q), f.dy(q));
      total += rule.weights[q] * jac * (g.dot(mat.A * g) + mat.c * f.val(q) * f.val(q));
    }
  }
  return total;
}

} // namespace hpeig
