#include "hpeig/estimator.hpp"

#include "hpeig/error.hpp"
#include "hpeig/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace hpeig {

namespace {

/// Squared L2 norms of the element residuals of all columns of `phi` on element k.
Eigen::VectorXd element_residuals(const Space& space, const Coefficients& coeffs, int k,
                                  const Eigen::MatrixXd& phi, const Eigen::VectorXd& mu)
{
  const Mesh& mesh = space.mesh();
  const auto map = element_map(mesh, k);
  const auto& mat = coeffs.at(mesh.element(k).region);
  const auto& rule = triangle_rule(2 * space.degree(k));
  const ShapeTable t = eval_shapes(map, space.layout(k), rule.x, rule.y, Derivatives::Hessians);

  const auto dofs = space.dofs(k);
  Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()), phi.cols());
  for (std::size_t i = 0; i < dofs.size(); ++i)
    if (dofs[i] >= 0)
      local.row(i) = phi.row(dofs[i]);

  const auto& A = mat.A;
  const Eigen::MatrixXd hess = A(0, 0) * t.dxx + 2.0 * A(0, 1) * t.dxy + A(1, 1) * t.dyy;
  const Eigen::MatrixXd R =
      t.val * local * (mu.array() - mat.c).matrix().asDiagonal() + hess * local;
  Eigen::VectorXd w(rule.size());
  for (int q = 0; q < rule.size(); ++q)
    w[q] = rule.weights[q] * 2.0 * map.area;
  return (R.array().square().matrix().transpose() * w);
}

/// Squared L2 norms of the edge residuals of all columns of `phi` on edge e.
Eigen::VectorXd edge_residuals(const Space& space, const Coefficients& coeffs, int e,
                               const Eigen::MatrixXd& phi)
{
  const Mesh& mesh = space.mesh();
  const Edge& edge = mesh.edge(e);
  if (edge.kind == EdgeKind::Dirichlet)
    return Eigen::VectorXd::Zero(phi.cols());

  const auto& rule = line_rule_for_degree(2 * space.max_edge_degree(e));
  const Point a = mesh.vertex(edge.vertices[0]), b = mesh.vertex(edge.vertices[1]);
  const double len = mesh.edge_length(e);
  const int npts = static_cast<int>(rule.points.size());

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(npts, phi.cols());
  for (int s = 0; s < 2; ++s) {
    const int k = edge.elements[s];
    if (k < 0)
      continue;
    const auto map = element_map(mesh, k);
    std::vector<double> xs(npts), ys(npts);
    for (int q = 0; q < npts; ++q) {
      const double t = rule.points[q];
      const auto ref = map.to_reference({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
      xs[q] = ref[0];
      ys[q] = ref[1];
    }
    const ShapeTable tab = eval_shapes(map, space.layout(k), xs, ys, Derivatives::Gradients);
    const auto dofs = space.dofs(k);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dofs.size()), phi.cols());
    for (std::size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] >= 0)
        local.row(i) = phi.row(dofs[i]);

    // outward normal: local edge j runs counterclockwise from vertex j+1 to j+2
    const int j = edge.local[s];
    const Point p = map.vertices[(j + 1) % 3], q = map.vertices[(j + 2) % 3];
    const double nx = (q.y - p.y) / len, ny = -(q.x - p.x) / len;
    const auto& A = coeffs.at(mesh.element(k).region).A;
    const Eigen::MatrixXd flux = (A(0, 0) * nx + A(1, 0) * ny) * tab.dx * local +
                                 (A(0, 1) * nx + A(1, 1) * ny) * tab.dy * local;
    r -= flux;
  }
  Eigen::VectorXd w(npts);
  for (int q = 0; q < npts; ++q)
    w[q] = rule.weights[q] * len;
  return r.array().square().matrix().transpose() * w;
}

} // namespace

double element_residual_norm2(const Space& space, const Coefficients& coeffs, int k,
                              const Eigen::VectorXd& phi, double mu)
{
  return element_residuals(space, coeffs, k, phi, Eigen::VectorXd::Constant(1, mu))[0];
}

double edge_jump_norm2(const Space& space, const Coefficients& coeffs, int e,
                       const Eigen::VectorXd& phi)
{
  return edge_residuals(space, coeffs, e, phi)[0];
}

double local_indicator(double h, int p, double residual2, std::span<const EdgeTerm> edges)
{
  double v = (h / p) * (h / p) * residual2;
  for (const auto& t : edges)
    v += t.weight * (t.h / t.p) * t.r2;
  return v;
}

Indicators estimate(const Space& space, const Coefficients& coeffs, const Eigen::VectorXd& values,
                    const Eigen::MatrixXd& vectors)
{
  const Mesh& mesh = space.mesh();
  const int m = static_cast<int>(values.size());
  if (vectors.cols() != m || vectors.rows() != space.num_dofs())
    throw ArgumentError("estimate: eigenvector block has the wrong shape");

  std::vector<Eigen::VectorXd> edge_r2(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
    edge_r2[e] = edge_residuals(space, coeffs, e, vectors);

  Indicators ind;
  ind.local.resize(mesh.num_elements(), m);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Eigen::VectorXd R2 = element_residuals(space, coeffs, k, vectors, values);
    for (int i = 0; i < m; ++i) {
      std::array<EdgeTerm, 3> terms;
      int count = 0;
      for (int e : mesh.element_edges(k)) {
        const Edge& edge = mesh.edge(e);
        if (edge.kind == EdgeKind::Dirichlet)
          continue;
        terms[count++] = EdgeTerm{mesh.edge_length(e), space.max_edge_degree(e), edge_r2[e][i],
                                  edge.kind == EdgeKind::Interior ? 0.5 : 1.0};
      }
      ind.local(k, i) = local_indicator(mesh.diameter(k), space.degree(k), R2[i],
                                        std::span<const EdgeTerm>(terms.data(), count));
    }
  }

  ind.totals.resize(m);
  std::vector<double> scaled(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd col = ind.local.col(i);
    ind.totals[i] = compensated_sum({col.data(), col.data() + col.size()});
    scaled[i] = ind.totals[i] / values[i];
  }
  ind.scaled_total = compensated_sum(scaled);
  ind.marking.resize(mesh.num_elements());
  for (int k = 0; k < mesh.num_elements(); ++k) {
    std::vector<double> terms(m);
    for (int i = 0; i < m; ++i)
      terms[i] = ind.local(k, i) / values[i];
    ind.marking[k] = compensated_sum(std::move(terms));
  }
  return ind;
}

double compensated_sum(std::vector<double> terms)
{
  std::sort(terms.begin(), terms.end());
  double sum = 0.0, carry = 0.0;
  for (double t : terms) {
    const double y = t - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return sum;
}

double relative_error_sum(const Eigen::VectorXd& computed, std::span<const double> exact)
{
  if (exact.empty() || static_cast<Eigen::Index>(exact.size()) < computed.size())
    throw ArgumentError("relative errors need a reference value for every eigenvalue");
  std::vector<double> terms(computed.size());
  for (Eigen::Index i = 0; i < computed.size(); ++i)
    terms[i] = (computed[i] - exact[i]) / computed[i];
  return compensated_sum(std::move(terms));
}

double effectivity(const Eigen::VectorXd& computed, std::span<const double> exact,
                   double scaled_estimate)
{
  return relative_error_sum(computed, exact) / scaled_estimate;
}

} // namespace hpeig
