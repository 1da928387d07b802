#include "hpeig/mesh.hpp"

#include "hpeig/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace hpeig {

namespace {

std::uint64_t edge_key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

} // namespace

std::string_view to_string(EdgeKind kind)
{
  switch (kind) {
  case EdgeKind::Interior: return "interior";
  case EdgeKind::Dirichlet: return "dirichlet";
  case EdgeKind::Neumann: return "neumann";
  }
  return "?";
}

double signed_area(const Point& a, const Point& b, const Point& c)
{
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Element> elements,
           std::vector<EdgeKind> boundary_kinds)
    : vertices_(std::move(vertices)), elements_(std::move(elements)),
      boundary_kinds_(std::move(boundary_kinds))
{
  for (const auto& p : vertices_)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw ArgumentError("mesh: non-finite vertex coordinate");

  areas_.resize(elements_.size());
  diameters_.resize(elements_.size());
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& v = elements_[k].vertices;
    for (int id : v)
      if (id < 0 || id >= num_vertices())
        throw ArgumentError("mesh: element " + std::to_string(k) + " references a missing vertex");
    const Point& a = vertices_[v[0]];
    const Point& b = vertices_[v[1]];
    const Point& c = vertices_[v[2]];
    const double h = std::max({distance(a, b), distance(b, c), distance(c, a)});
    const double area = signed_area(a, b, c);
    if (!(area > 1e-14 * h * h))
      throw ArgumentError("mesh: element " + std::to_string(k) + " is inverted or degenerate");
    areas_[k] = area;
    diameters_[k] = h;
  }
  build_topology();
}

void Mesh::build_topology()
{
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(elements_.size() * 2);
  element_edges_.assign(elements_.size(), {-1, -1, -1});

  for (int k = 0; k < num_elements(); ++k) {
    const auto& el = elements_[k];
    for (int j = 0; j < 3; ++j) {
      const int a = el.vertices[(j + 1) % 3];
      const int b = el.vertices[(j + 2) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), num_edges());
      if (inserted) {
        Edge e;
        e.vertices = {std::min(a, b), std::max(a, b)};
        e.elements[0] = k;
        e.local[0] = j;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.elements[1] >= 0)
          throw ArgumentError("mesh: edge shared by more than two elements");
        e.elements[1] = k;
        e.local[1] = j;
      }
      element_edges_[k][j] = it->second;
    }
  }

  for (auto& e : edges_) {
    if (!e.is_boundary()) {
      e.kind = EdgeKind::Interior;
      continue;
    }
    const int id = elements_[e.elements[0]].boundary[e.local[0]];
    if (id < 0 || id >= static_cast<int>(boundary_kinds_.size()))
      throw ArgumentError("mesh: boundary edge without a valid boundary id");
    e.boundary_id = id;
    e.kind = boundary_kinds_[id];
    if (e.kind == EdgeKind::Interior)
      throw ArgumentError("mesh: boundary segment mapped to interior kind");
  }
}

double Mesh::edge_length(int e) const
{
  return distance(vertices_[edges_[e].vertices[0]], vertices_[edges_[e].vertices[1]]);
}

Point Mesh::centroid(int k) const
{
  const auto& v = elements_[k].vertices;
  return {(vertices_[v[0]].x + vertices_[v[1]].x + vertices_[v[2]].x) / 3.0,
          (vertices_[v[0]].y + vertices_[v[1]].y + vertices_[v[2]].y) / 3.0};
}

double Mesh::total_area() const
{
  std::vector<double> a = areas_;
  std::sort(a.begin(), a.end());
  return std::accumulate(a.begin(), a.end(), 0.0);
}

std::vector<std::vector<int>> Mesh::vertex_neighbours() const
{
  std::vector<std::vector<int>> at_vertex(vertices_.size());
  for (int k = 0; k < num_elements(); ++k)
    for (int v : elements_[k].vertices)
      at_vertex[v].push_back(k);

  std::vector<std::vector<int>> result(elements_.size());
  for (int k = 0; k < num_elements(); ++k) {
    auto& nb = result[k];
    for (int v : elements_[k].vertices)
      for (int other : at_vertex[v])
        if (other != k)
          nb.push_back(other);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Newest-vertex bisection

RefinementResult refine(const Mesh& mesh, std::span<const int> marked)
{
  const int n_el = mesh.num_elements();
  auto refinement_edge = [&](const Element& el) {
    return edge_key(el.vertices[(el.peak + 1) % 3], el.vertices[(el.peak + 2) % 3]);
  };

  std::unordered_set<std::uint64_t> split;
  for (int k : marked) {
    if (k < 0 || k >= n_el)
      throw ArgumentError("refine: marked element id out of range");
    split.insert(refinement_edge(mesh.element(k)));
  }

  // Closure: any element with a split edge must also split its refinement edge.
  for (bool changed = !split.empty(); changed;) {
    changed = false;
    for (const auto& el : mesh.elements()) {
      const auto ref = refinement_edge(el);
      if (split.contains(ref))
        continue;
      for (int j = 0; j < 3; ++j) {
        if (split.contains(edge_key(el.vertices[(j + 1) % 3], el.vertices[(j + 2) % 3]))) {
          split.insert(ref);
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<Point> vertices(mesh.vertices().begin(), mesh.vertices().end());
  std::unordered_map<std::uint64_t, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<int>(vertices.size()));
    if (inserted) {
      const Point& pa = vertices[a];
      const Point& pb = vertices[b];
      vertices.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    }
    return it->second;
  };

  std::vector<Element> elements;
  std::vector<int> parent;
  elements.reserve(static_cast<std::size_t>(n_el) + 2 * split.size());

  auto bisect = [&](auto&& self, const Element& el, int origin) -> void {
    if (!split.contains(refinement_edge(el))) {
      elements.push_back(el);
      parent.push_back(origin);
      return;
    }
    const int k = el.peak;
    const int a = el.vertices[k];
    const int b = el.vertices[(k + 1) % 3];
    const int c = el.vertices[(k + 2) % 3];
    const int tag_bc = el.boundary[k];
    const int tag_ca = el.boundary[(k + 1) % 3];
    const int tag_ab = el.boundary[(k + 2) % 3];
    const int m = midpoint_of(b, c);

    Element left = el;
    left.vertices = {a, b, m};
    left.peak = 2;
    left.level = el.level + 1;
    left.parent = origin;
    left.boundary = {tag_bc, kNoBoundary, tag_ab};

    Element right = el;
    right.vertices = {a, m, c};
    right.peak = 1;
    right.level = el.level + 1;
    right.parent = origin;
    right.boundary = {tag_bc, tag_ca, kNoBoundary};

    self(self, left, origin);
    self(self, right, origin);
  };

  for (int k = 0; k < n_el; ++k)
    bisect(bisect, mesh.element(k), k);

  std::vector<EdgeKind> kinds(mesh.boundary_kinds().begin(), mesh.boundary_kinds().end());
  return {Mesh(std::move(vertices), std::move(elements), std::move(kinds)), std::move(parent)};
}

RefinementResult refine_uniform(const Mesh& mesh, int sweeps)
{
  std::vector<int> parent(mesh.num_elements());
  std::iota(parent.begin(), parent.end(), 0);
  RefinementResult current{mesh, parent};
  for (int s = 0; s < sweeps; ++s) {
    std::vector<int> all(current.mesh.num_elements());
    std::iota(all.begin(), all.end(), 0);
    auto next = refine(current.mesh, all);
    for (auto& p : next.parent)
      p = current.parent[p];
    current = std::move(next);
  }
  return current;
}

Regularity regularity_report(const Mesh& mesh, std::span<const int> degrees)
{
  if (static_cast<int>(degrees.size()) != mesh.num_elements())
    throw ArgumentError("regularity_report: degree map size mismatch");
  Regularity r;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const double h = mesh.diameter(k);
    r.gamma_shape = std::max(r.gamma_shape, h * h / mesh.area(k));
  }
  const auto nb = mesh.vertex_neighbours();
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int other : nb[k])
      r.gamma_degree =
          std::max(r.gamma_degree, (degrees[k] + 1.0) / static_cast<double>(degrees[other] + 1));
  return r;
}

} // namespace hpeig
