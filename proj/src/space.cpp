#include "hpeig/space.hpp"

#include "hpeig/error.hpp"
#include "hpeig/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hpeig {

namespace {

constexpr std::array<std::array<double, 2>, 3> kRefVertex{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};

} // namespace

Space::Space(std::shared_ptr<const Mesh> mesh, std::vector<int> degrees)
    : mesh_(std::move(mesh)), degrees_(std::move(degrees))
{
  if (!mesh_)
    throw ArgumentError("space: null mesh");
  const Mesh& m = *mesh_;
  if (static_cast<int>(degrees_.size()) != m.num_elements())
    throw ArgumentError("space: degree map size does not match the mesh");
  for (int p : degrees_)
    if (p < 1)
      throw ArgumentError("space: polynomial degree must be >= 1");

  edge_degree_.resize(m.num_edges());
  std::vector<char> vertex_fixed(m.num_vertices(), 0);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edge(e);
    int p = degrees_[ed.elements[0]];
    if (ed.elements[1] >= 0)
      p = std::min(p, degrees_[ed.elements[1]]);
    edge_degree_[e] = p;
    if (ed.kind == EdgeKind::Dirichlet)
      vertex_fixed[ed.vertices[0]] = vertex_fixed[ed.vertices[1]] = 1;
  }

  int next = 0;
  vertex_dof_.assign(m.num_vertices(), -1);
  for (int v = 0; v < m.num_vertices(); ++v)
    if (!vertex_fixed[v])
      vertex_dof_[v] = next++;
  edge_dof_.assign(m.num_edges(), -1);
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.edge(e).kind != EdgeKind::Dirichlet && edge_degree_[e] >= 2) {
      edge_dof_[e] = next;
      next += edge_degree_[e] - 1;
    }

  layouts_.resize(m.num_elements());
  dof_offsets_.assign(m.num_elements() + 1, 0);
  for (int k = 0; k < m.num_elements(); ++k) {
    ShapeLayout& l = layouts_[k];
    const auto& v = m.element(k).vertices;
    l.degree = degrees_[k];
    for (int j = 0; j < 3; ++j) {
      l.edge_degree[j] = edge_degree_[m.element_edge(k, j)];
      l.edge_reversed[j] = v[(j + 1) % 3] > v[(j + 2) % 3];
    }
    dof_offsets_[k + 1] = dof_offsets_[k] + l.size();
  }

  dof_table_.assign(dof_offsets_.back(), -1);
  for (int k = 0; k < m.num_elements(); ++k) {
    const ShapeLayout& l = layouts_[k];
    int* row = dof_table_.data() + dof_offsets_[k];
    for (int i = 0; i < 3; ++i)
      row[i] = vertex_dof_[m.element(k).vertices[i]];
    for (int j = 0; j < 3; ++j) {
      const int first = edge_dof_[m.element_edge(k, j)];
      if (first < 0)
        continue;
      for (int i = 0; i < l.num_edge_modes(j); ++i)
        row[l.edge_offset(j) + i] = first + i;
    }
    for (int i = 0; i < l.num_bubbles(); ++i)
      row[l.bubble_offset() + i] = next++;
  }
  num_dofs_ = next;
}

int Space::max_degree() const
{
  return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

std::span<const int> Space::dofs(int k) const
{
  return {dof_table_.data() + dof_offsets_[k],
          static_cast<std::size_t>(dof_offsets_[k + 1] - dof_offsets_[k])};
}

int Space::max_edge_degree(int e) const
{
  const Edge& ed = mesh_->edge(e);
  int p = degrees_[ed.elements[0]];
  if (ed.elements[1] >= 0)
    p = std::max(p, degrees_[ed.elements[1]]);
  return p;
}

Eigen::VectorXd Space::local_coefficients(int k, const Eigen::VectorXd& global) const
{
  const auto map = dofs(k);
  Eigen::VectorXd c(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    c[i] = map[i] >= 0 ? global[map[i]] : 0.0;
  return c;
}

ShapeTable eval_function(const Space& space, const Eigen::VectorXd& coeffs, int k,
                         std::span<const double> xs, std::span<const double> ys,
                         Derivatives derivs)
{
  const auto map = element_map(space.mesh(), k);
  const ShapeTable t = eval_shapes(map, space.layout(k), xs, ys, derivs);
  const Eigen::VectorXd c = space.local_coefficients(k, coeffs);
  ShapeTable r;
  r.val = t.val * c;
  if (t.dx.size()) {
    r.dx = t.dx * c;
    r.dy = t.dy * c;
  }
  if (t.dxx.size()) {
    r.dxx = t.dxx * c;
    r.dxy = t.dxy * c;
    r.dyy = t.dyy * c;
  }
  return r;
}

double eval_at(const Space& space, const Eigen::VectorXd& coeffs, int k, const Point& p)
{
  const auto map = element_map(space.mesh(), k);
  const auto ref = map.to_reference(p);
  const double xs[] = {ref[0]};
  const double ys[] = {ref[1]};
  const ShapeTable t = eval_shapes(map, space.layout(k), xs, ys, Derivatives::Values);
  return t.val.row(0).dot(space.local_coefficients(k, coeffs));
}

Eigen::VectorXd interpolate(const Space& space, const ElementFunction& f)
{
  const Mesh& mesh = space.mesh();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(space.num_dofs());

  std::vector<char> done(mesh.num_vertices(), 0);
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int v : mesh.element(k).vertices)
      if (!done[v]) {
        done[v] = 1;
        if (const int d = space.vertex_dof(v); d >= 0)
          u[d] = f(k, mesh.vertex(v));
      }

  // Edge modes: H1-seminorm projection along the edge. The remainder vanishes at
  // both endpoints, so integrating by parts needs only its values.
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int first = space.edge_dof(e);
    if (first < 0)
      continue;
    const int k = mesh.edge(e).elements[0];
    const int j = mesh.edge(e).local[0];
    const ShapeLayout& layout = space.layout(k);
    const int pe = layout.edge_degree[j];
    const auto map = element_map(mesh, k);
    const auto& rule = line_rule_for_degree(2 * pe + 4);
    const auto& ra = kRefVertex[(j + 1) % 3];
    const auto& rb = kRefVertex[(j + 2) % 3];
    std::vector<double> xs, ys;
    for (double s : rule.points) {
      xs.push_back(ra[0] + s * (rb[0] - ra[0]));
      ys.push_back(ra[1] + s * (rb[1] - ra[1]));
    }
    const Point pa = map.to_physical(ra[0], ra[1]), pb = map.to_physical(rb[0], rb[1]);
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    const double tx = (pb.x - pa.x) / len, ty = (pb.y - pa.y) / len;
    const ShapeTable t = eval_shapes(map, layout, xs, ys, Derivatives::Hessians);
    const Eigen::VectorXd c = space.local_coefficients(k, u);
    const int n = pe - 1;
    const int off = layout.edge_offset(j);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t q = 0; q < xs.size(); ++q) {
      const double w = rule.weights[q] * len;
      const double g = f(k, map.to_physical(xs[q], ys[q])) - t.val.row(q).head<3>().dot(c.head<3>());
      const Eigen::RowVectorXd d1 = tx * t.dx.row(q).segment(off, n) + ty * t.dy.row(q).segment(off, n);
      const Eigen::RowVectorXd d2 = tx * tx * t.dxx.row(q).segment(off, n) +
                                    2.0 * tx * ty * t.dxy.row(q).segment(off, n) +
                                    ty * ty * t.dyy.row(q).segment(off, n);
      gram += w * d1.transpose() * d1;
      rhs -= w * g * d2.transpose();
    }
    u.segment(first, n) = gram.ldlt().solve(rhs);
  }

  // Interior modes: H1-seminorm projection, again by parts:
  // ∫ ∇g·∇b = -∫ g Δb + ∫_∂K g ∂b/∂n.
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const ShapeLayout& layout = space.layout(k);
    const int n = layout.num_bubbles();
    if (n == 0)
      continue;
    const auto map = element_map(mesh, k);
    Eigen::VectorXd c = space.local_coefficients(k, u);
    const int off = layout.bubble_offset();
    c.segment(off, n).setZero();
    const double jac = 2.0 * map.area;

    const auto& rule = triangle_rule(2 * layout.degree + 4);
    const ShapeTable t = eval_shapes(map, layout, rule.x, rule.y, Derivatives::Hessians);
    const Eigen::VectorXd known = t.val * c;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * jac;
      const double g = f(k, map.to_physical(rule.x[q], rule.y[q])) - known[q];
      const Eigen::RowVectorXd gx = t.dx.row(q).segment(off, n);
      const Eigen::RowVectorXd gy = t.dy.row(q).segment(off, n);
      gram += w * (gx.transpose() * gx + gy.transpose() * gy);
      rhs -= w * g * (t.dxx.row(q).segment(off, n) + t.dyy.row(q).segment(off, n)).transpose();
    }

    const auto& line = line_rule_for_degree(2 * layout.degree + 4);
    for (int j = 0; j < 3; ++j) {
      const auto& ra = kRefVertex[(j + 1) % 3];
      const auto& rb = kRefVertex[(j + 2) % 3];
      std::vector<double> xs, ys;
      for (double s : line.points) {
        xs.push_back(ra[0] + s * (rb[0] - ra[0]));
        ys.push_back(ra[1] + s * (rb[1] - ra[1]));
      }
      const Point pa = map.to_physical(ra[0], ra[1]), pb = map.to_physical(rb[0], rb[1]);
      const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
      const double nx = (pb.y - pa.y) / len, ny = -(pb.x - pa.x) / len;
      const ShapeTable b = eval_shapes(map, layout, xs, ys, Derivatives::Gradients);
      const Eigen::VectorXd kb = b.val * c;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        const double g = f(k, map.to_physical(xs[q], ys[q])) - kb[q];
        rhs += line.weights[q] * len * g *
               (nx * b.dx.row(q).segment(off, n) + ny * b.dy.row(q).segment(off, n)).transpose();
      }
    }

    const Eigen::VectorXd coef = gram.ldlt().solve(rhs);
    const auto map_dofs = space.dofs(k);
    for (int i = 0; i < n; ++i)
      u[map_dofs[off + i]] = coef[i];
  }
  return u;
}

Eigen::VectorXd interpolate(const Space& space, const std::function<double(const Point&)>& f)
{
  return interpolate(space, ElementFunction([&f](int, const Point& p) { return f(p); }));
}

Eigen::VectorXd prolong(const Space& coarse, const Eigen::VectorXd& coeffs, const Space& fine,
                        std::span<const int> parent)
{
  if (static_cast<int>(parent.size()) != fine.mesh().num_elements())
    throw ArgumentError("prolong: parent map size does not match the fine mesh");
  return interpolate(fine, ElementFunction([&](int k, const Point& p) {
                       return eval_at(coarse, coeffs, parent[k], p);
                     }));
}

} // namespace hpeig
