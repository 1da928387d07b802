#include "hpeig/error.hpp"
#include "hpeig/mesh.hpp"

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

namespace hpeig {

namespace {

const double sqrt3 = std::sqrt(3.0);

/// Assign boundary ids to every element edge that has a single adjacent element.
template <class Classify>
void tag_boundary(const std::vector<Point>& vertices, std::vector<Element>& elements,
                  Classify&& classify)
{
  std::map<std::pair<int, int>, int> count;
  auto key = [](int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (const auto& el : elements)
    for (int j = 0; j < 3; ++j)
      ++count[key(el.vertices[(j + 1) % 3], el.vertices[(j + 2) % 3])];
  for (auto& el : elements) {
    for (int j = 0; j < 3; ++j) {
      const int a = el.vertices[(j + 1) % 3];
      const int b = el.vertices[(j + 2) % 3];
      if (count[key(a, b)] == 1)
        el.boundary[j] = classify(el, vertices[a], vertices[b]);
    }
  }
}

/// Drop vertices no element references and renumber densely.
void compact(std::vector<Point>& vertices, std::vector<Element>& elements)
{
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Point> kept;
  for (auto& el : elements)
    for (int& v : el.vertices) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(kept.size());
        kept.push_back(vertices[v]);
      }
      v = remap[v];
    }
  vertices = std::move(kept);
}

std::vector<EdgeKind> kinds_of(const GeometryOptions& o)
{
  return {o.boundary_kinds.begin(), o.boundary_kinds.end()};
}

/// n x n cells on (0,1)^2, each split in two along a diagonal pointing at the centre.
Mesh square_mesh(const GeometryOptions& o, bool touching, bool slit)
{
  const int n = o.grid;
  if (n < 1)
    throw ArgumentError("square mesh: grid must be >= 1");
  if ((touching || slit) && n % 2 != 0)
    throw ArgumentError("square mesh: grid must be even for this geometry");

  std::vector<Point> vertices;
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  // Duplicate the vertices on the open slit {y = 1/2, x > 1/2}: copies serve the upper side.
  std::unordered_map<int, int> upper_copy;
  if (slit) {
    for (int i = n / 2 + 1; i <= n; ++i) {
      const int v = id(i, n / 2);
      upper_copy[v] = static_cast<int>(vertices.size());
      vertices.push_back(vertices[v]);
    }
  }

  std::vector<Element> elements;
  auto add = [&](int a, int b, int c, int peak, bool upper_cell, Point centre) {
    Element el;
    el.vertices = {a, b, c};
    if (slit && upper_cell)
      for (int& v : el.vertices)
        if (auto it = upper_copy.find(v); it != upper_copy.end())
          v = it->second;
    el.peak = peak;
    if (touching) {
      const bool lower = centre.y < 0.5;
      const bool left = centre.x < 0.5;
      const bool main_pair = (lower && left) || (!lower && !left);
      el.region = (main_pair == o.main_diagonal) ? 1 : 0;
    }
    elements.push_back(el);
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      const bool upper = 2 * j >= n;
      const Point centre{(i + 0.5) / n, (j + 0.5) / n};
      // Diagonals radiate from the centre: symmetric under both axis reflections.
      const bool slash = (2 * i < n) == (2 * j < n);
      if (slash) {
        add(a, b, c, 1, upper, centre);
        add(a, c, d, 2, upper, centre);
      } else {
        add(a, b, d, 0, upper, centre);
        add(b, c, d, 1, upper, centre);
      }
    }
  }

  tag_boundary(vertices, elements, [&](const Element& el, const Point& p, const Point& q) {
    if (slit && std::abs(p.y - 0.5) < 1e-12 && std::abs(q.y - 0.5) < 1e-12 &&
        std::min(p.x, q.x) >= 0.5 - 1e-12) {
      const auto& v = el.vertices;
      const double cy = (vertices[v[0]].y + vertices[v[1]].y + vertices[v[2]].y) / 3.0;
      return cy > 0.5 ? boundary::slit_top : boundary::slit_bottom;
    }
    return boundary::outer;
  });
  return Mesh(std::move(vertices), std::move(elements), kinds_of(o));
}

/// Structured subdivision of the equilateral triangle with the given edge length.
/// With a hole, cells whose centroid falls in the concentric upward hole triangle are removed.
Mesh triangle_mesh(const GeometryOptions& o, double edge, double hole_edge)
{
  const int n = o.grid;
  if (n < 1)
    throw ArgumentError("triangle mesh: grid must be >= 1");
  if (hole_edge > 0.0 && n % 4 != 0)
    throw ArgumentError("triangle-with-hole mesh: grid must be a multiple of 4");

  std::vector<Point> vertices;
  std::vector<std::vector<int>> id(n + 1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i + j <= n; ++i) {
      id[j].push_back(static_cast<int>(vertices.size()));
      vertices.push_back({edge * (i + 0.5 * j) / n, edge * (0.5 * sqrt3 * j) / n});
    }

  const Point centre{0.5 * edge, edge * sqrt3 / 6.0};
  const double hh = hole_edge * sqrt3 / 2.0;
  const Point h0{centre.x - 0.5 * hole_edge, centre.y - hh / 3.0};
  const Point h1{centre.x + 0.5 * hole_edge, centre.y - hh / 3.0};
  const Point h2{centre.x, centre.y + 2.0 * hh / 3.0};
  auto in_hole = [&](const Point& p) {
    return hole_edge > 0.0 && signed_area(h0, h1, p) > 0 && signed_area(h1, h2, p) > 0 &&
           signed_area(h2, h0, p) > 0;
  };

  std::vector<Element> elements;
  auto add = [&](int a, int b, int c, int peak) {
    const Point g{(vertices[a].x + vertices[b].x + vertices[c].x) / 3.0,
                  (vertices[a].y + vertices[b].y + vertices[c].y) / 3.0};
    if (in_hole(g))
      return;
    Element el;
    el.vertices = {a, b, c};
    el.peak = peak;
    elements.push_back(el);
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + j < n; ++i) {
      // Up cell and the down cell above-right share the refinement edge.
      add(id[j][i], id[j][i + 1], id[j + 1][i], 0);
      if (i + j + 1 < n)
        add(id[j][i + 1], id[j + 1][i + 1], id[j + 1][i], 1);
    }

  compact(vertices, elements);
  tag_boundary(vertices, elements, [&](const Element&, const Point& p, const Point& q) {
    const Point mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    const double tol = 1e-9 * edge;
    const bool on_outer = std::abs(mid.y) < tol ||
                          std::abs(sqrt3 * mid.x - mid.y) < tol ||
                          std::abs(sqrt3 * (edge - mid.x) - mid.y) < tol;
    return on_outer ? boundary::outer : boundary::hole;
  });
  return Mesh(std::move(vertices), std::move(elements), kinds_of(o));
}

} // namespace

Geometry geometry_from_name(std::string_view name)
{
  if (name == "unit_square")
    return Geometry::UnitSquare;
  if (name == "touching_squares")
    return Geometry::TouchingSquares;
  if (name == "triangle")
    return Geometry::Triangle;
  if (name == "triangle_hole")
    return Geometry::TriangleWithHole;
  if (name == "slit_square")
    return Geometry::SlitSquare;
  throw ConfigError("unknown geometry '" + std::string(name) + "'");
}

std::string_view to_string(Geometry g)
{
  switch (g) {
  case Geometry::UnitSquare: return "unit_square";
  case Geometry::TouchingSquares: return "touching_squares";
  case Geometry::Triangle: return "triangle";
  case Geometry::TriangleWithHole: return "triangle_hole";
  case Geometry::SlitSquare: return "slit_square";
  }
  return "?";
}

double geometry_area(Geometry g)
{
  switch (g) {
  case Geometry::UnitSquare:
  case Geometry::TouchingSquares:
  case Geometry::SlitSquare: return 1.0;
  case Geometry::Triangle: return sqrt3 / 4.0;
  case Geometry::TriangleWithHole: return sqrt3 / 4.0 * (4.0 - 0.25);
  }
  return 0.0;
}

Mesh build_mesh(Geometry g, const GeometryOptions& options)
{
  switch (g) {
  case Geometry::UnitSquare: return square_mesh(options, false, false);
  case Geometry::TouchingSquares: return square_mesh(options, true, false);
  case Geometry::SlitSquare: return square_mesh(options, false, true);
  case Geometry::Triangle: return triangle_mesh(options, 1.0, 0.0);
  case Geometry::TriangleWithHole: return triangle_mesh(options, 2.0, 0.5);
  }
  throw ConfigError("unknown geometry");
}

} // namespace hpeig
