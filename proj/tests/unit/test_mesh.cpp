#include "hpeig/error.hpp"
#include "hpeig/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

using namespace hpeig;

namespace {

GeometryOptions grid(int n)
{
  GeometryOptions o;
  o.grid = n;
  return o;
}

/// Interior edges must see the same vertex pair from both sides.
void check_conforming(const Mesh& m)
{
  for (const auto& e : m.edges()) {
    if (e.is_boundary()) {
      CHECK(e.boundary_id != kNoBoundary);
      continue;
    }
    for (int s = 0; s < 2; ++s) {
      const auto& el = m.element(e.elements[s]);
      const int j = e.local[s];
      const int a = el.vertices[(j + 1) % 3], b = el.vertices[(j + 2) % 3];
      CHECK(std::min(a, b) == e.vertices[0]);
      CHECK(std::max(a, b) == e.vertices[1]);
    }
  }
  for (int k = 0; k < m.num_elements(); ++k)
    CHECK(m.area(k) > 0.0);
}

} // namespace

TEST_CASE("single cell square")
{
  const Mesh m = build_mesh(Geometry::UnitSquare, grid(1));
  CHECK(m.num_elements() == 2);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_edges() == 5);
  check_conforming(m);
}

TEST_CASE("areas sum to the polygon area")
{
  for (auto g : {Geometry::UnitSquare, Geometry::TouchingSquares, Geometry::SlitSquare,
                 Geometry::Triangle, Geometry::TriangleWithHole}) {
    const Mesh m = build_mesh(g, grid(8));
    CHECK(m.total_area() == doctest::Approx(geometry_area(g)).epsilon(1e-12));
    check_conforming(m);
  }
}

TEST_CASE("equilateral elements")
{
  const Mesh m = build_mesh(Geometry::Triangle, grid(3));
  CHECK(m.num_elements() == 9);
  const std::vector<int> p(m.num_elements(), 2);
  const auto r = regularity_report(m, p);
  CHECK(r.gamma_shape == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.gamma_degree == 1.0);
}

TEST_CASE("touching squares regions follow the quadrants")
{
  const Mesh m = build_mesh(Geometry::TouchingSquares, grid(6));
  for (int k = 0; k < m.num_elements(); ++k) {
    const auto& el = m.element(k);
    for (int v : el.vertices) {
      const Point p = m.vertex(v);
      const Point c = m.centroid(k);
      // each vertex lies in the closure of the centroid's quadrant
      CHECK((c.x < 0.5 ? p.x <= 0.5 : p.x >= 0.5));
      CHECK((c.y < 0.5 ? p.y <= 0.5 : p.y >= 0.5));
    }
    const Point c = m.centroid(k);
    const bool main = (c.x < 0.5) == (c.y < 0.5);
    CHECK(el.region == (main ? 1 : 0));
  }
}

TEST_CASE("slit vertices are duplicated, tip is not")
{
  const int n = 8;
  const Mesh m = build_mesh(Geometry::SlitSquare, grid(n));
  CHECK(m.num_vertices() == (n + 1) * (n + 1) + n / 2);
  std::map<int, int> count;
  for (const auto& e : m.edges())
    if (e.is_boundary())
      ++count[e.boundary_id];
  CHECK(count[boundary::slit_top] == n / 2);
  CHECK(count[boundary::slit_bottom] == n / 2);
  CHECK(count[boundary::outer] == 4 * n);

  // No element touches both copies of a slit vertex pair, and none crosses the slit.
  for (int k = 0; k < m.num_elements(); ++k) {
    const Point c = m.centroid(k);
    for (int v : m.element(k).vertices) {
      const Point p = m.vertex(v);
      if (std::abs(p.y - 0.5) < 1e-14 && p.x > 0.5 + 1e-14) {
        const bool copy = v >= (n + 1) * (n + 1);
        CHECK(copy == (c.y > 0.5));
      }
    }
  }
  int tip_users = 0;
  for (int k = 0; k < m.num_elements(); ++k)
    for (int v : m.element(k).vertices)
      if (v == (n / 2) * (n + 1) + n / 2)
        ++tip_users;
  CHECK(tip_users == 8);
  check_conforming(m);
}

TEST_CASE("triangle with hole")
{
  const Mesh m = build_mesh(Geometry::TriangleWithHole, grid(8));
  int hole_edges = 0;
  double hole_length = 0.0;
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.edge(e).boundary_id == boundary::hole) {
      ++hole_edges;
      hole_length += m.edge_length(e);
    }
  CHECK(hole_edges == 6);
  CHECK(hole_length == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("unknown geometry is rejected")
{
  CHECK_THROWS_AS(geometry_from_name("disk"), ConfigError);
}

TEST_CASE("empty marking leaves the mesh unchanged")
{
  const Mesh m = build_mesh(Geometry::UnitSquare, grid(2));
  const auto r = refine(m, {});
  CHECK(r.mesh.num_elements() == m.num_elements());
  CHECK(r.mesh.num_vertices() == m.num_vertices());
  for (int k = 0; k < m.num_elements(); ++k)
    CHECK(r.parent[k] == k);
}

TEST_CASE("closure keeps single marks conforming")
{
  const Mesh m = build_mesh(Geometry::UnitSquare, grid(1));
  const int marked[] = {0};
  const auto r = refine(m, marked);
  CHECK(r.mesh.num_elements() == 4);
  CHECK(r.mesh.num_vertices() == 5);
  check_conforming(r.mesh);
  CHECK(r.mesh.total_area() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("shape regularity stable under uniform refinement")
{
  Mesh m = build_mesh(Geometry::UnitSquare, grid(1));
  double lo = 1e300, hi = 0.0;
  for (int gen = 0; gen <= 10; ++gen) {
    const double g = regularity_report(m, std::vector<int>(m.num_elements(), 1)).gamma_shape;
    lo = std::min(lo, g);
    hi = std::max(hi, g);
    if (gen < 10)
      m = refine_uniform(m).mesh;
  }
  CHECK(m.num_elements() == 2 * 1024);
  CHECK(hi / lo <= 2.0);
  check_conforming(m);
}

TEST_CASE("random local refinement stays conforming and regular")
{
  for (auto g : {Geometry::SlitSquare, Geometry::Triangle, Geometry::TriangleWithHole}) {
    Mesh m = build_mesh(g, grid(4));
    const double g0 = regularity_report(m, std::vector<int>(m.num_elements(), 1)).gamma_shape;
    std::mt19937 rng(7);
    for (int step = 0; step < 12; ++step) {
      std::vector<int> marked;
      for (int k = 0; k < m.num_elements(); ++k)
        if (rng() % 5 == 0)
          marked.push_back(k);
      auto r = refine(m, marked);
      for (int k = 0; k < r.mesh.num_elements(); ++k) {
        // children lie inside their parent
        const Point c = r.mesh.centroid(k);
        const auto& pv = m.element(r.parent[k]).vertices;
        const Point a = m.vertex(pv[0]), b = m.vertex(pv[1]), d = m.vertex(pv[2]);
        CHECK(signed_area(a, b, c) > 0);
        CHECK(signed_area(b, d, c) > 0);
        CHECK(signed_area(d, a, c) > 0);
        CHECK(r.mesh.element(k).region == m.element(r.parent[k]).region);
      }
      m = std::move(r.mesh);
    }
    check_conforming(m);
    CHECK(m.total_area() == doctest::Approx(geometry_area(g)).epsilon(1e-12));
    const double g1 = regularity_report(m, std::vector<int>(m.num_elements(), 1)).gamma_shape;
    // bisecting equilateral triangles produces 30-60-90 and 30-30-120 shapes: at most 3x
    CHECK(g1 <= 3.0 * g0 * (1 + 1e-12));
  }
}

TEST_CASE("degree regularity")
{
  const Mesh m = build_mesh(Geometry::UnitSquare, grid(1));
  const int p[] = {1, 3};
  CHECK(regularity_report(m, p).gamma_degree == doctest::Approx(2.0));
}

TEST_CASE("degenerate element rejected")
{
  std::vector<Point> v{{0, 0}, {1, 0}, {2, 0}};
  std::vector<Element> e(1);
  e[0].vertices = {0, 1, 2};
  e[0].boundary = {0, 0, 0};
  CHECK_THROWS_AS(Mesh(v, e, {EdgeKind::Dirichlet}), ArgumentError);
}
