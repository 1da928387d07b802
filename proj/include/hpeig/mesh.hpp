#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hpeig {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class EdgeKind : std::uint8_t { Interior, Dirichlet, Neumann };

std::string_view to_string(EdgeKind kind);

/// Sentinel for element edges that are not on the boundary.
inline constexpr int kNoBoundary = -1;

/// Boundary segment ids used by the built-in geometries.
namespace boundary {
inline constexpr int outer = 0;
inline constexpr int slit_top = 1;
inline constexpr int slit_bottom = 2;
inline constexpr int hole = 3;
inline constexpr int count = 4;
} // namespace boundary

/// A triangle. Local edge j is the edge opposite local vertex j.
struct Element {
  std::array<int, 3> vertices{};                 ///< counterclockwise
  int region = 0;                                ///< material region tag
  int peak = 0;                                  ///< newest vertex; refinement edge is opposite
  int level = 0;                                 ///< number of bisections from the initial mesh
  int parent = -1;                               ///< element id in the mesh this one was refined from
  std::array<int, 3> boundary{kNoBoundary, kNoBoundary, kNoBoundary};
};

struct Edge {
  std::array<int, 2> vertices{};     ///< ascending vertex ids
  EdgeKind kind = EdgeKind::Interior;
  int boundary_id = kNoBoundary;
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> local{-1, -1};  ///< local edge index within each adjacent element

  [[nodiscard]] bool is_boundary() const { return elements[1] < 0; }
};

/// Conforming triangulation with edge topology. Immutable once built.
class Mesh {
public:
  /// `boundary_kinds[id]` gives the condition imposed on boundary segment `id`.
  /// Throws ArgumentError on inverted/degenerate elements, non-manifold edges or
  /// untagged boundary edges.
  Mesh(std::vector<Point> vertices, std::vector<Element> elements,
       std::vector<EdgeKind> boundary_kinds);

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_elements() const { return static_cast<int>(elements_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

  [[nodiscard]] const Point& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] const Element& element(int k) const { return elements_[k]; }
  [[nodiscard]] const Edge& edge(int e) const { return edges_[e]; }
  [[nodiscard]] std::span<const Point> vertices() const { return vertices_; }
  [[nodiscard]] std::span<const Element> elements() const { return elements_; }
  [[nodiscard]] std::span<const Edge> edges() const { return edges_; }
  [[nodiscard]] std::span<const EdgeKind> boundary_kinds() const { return boundary_kinds_; }

  /// Global edge id of local edge j of element k.
  [[nodiscard]] int element_edge(int k, int j) const { return element_edges_[k][j]; }
  [[nodiscard]] const std::array<int, 3>& element_edges(int k) const { return element_edges_[k]; }

  [[nodiscard]] double area(int k) const { return areas_[k]; }
  /// Element diameter (longest edge).
  [[nodiscard]] double diameter(int k) const { return diameters_[k]; }
  [[nodiscard]] double edge_length(int e) const;
  [[nodiscard]] Point centroid(int k) const;
  [[nodiscard]] double total_area() const;

  /// Elements sharing at least one vertex with k (excluding k), ascending.
  [[nodiscard]] std::vector<std::vector<int>> vertex_neighbours() const;

private:
  void build_topology();

  std::vector<Point> vertices_;
  std::vector<Element> elements_;
  std::vector<EdgeKind> boundary_kinds_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> element_edges_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
};

double signed_area(const Point& a, const Point& b, const Point& c);

struct RefinementResult {
  Mesh mesh;
  std::vector<int> parent;  ///< parent[k] = element id in the input mesh
};

/// Newest-vertex bisection of the marked elements followed by conforming closure.
RefinementResult refine(const Mesh& mesh, std::span<const int> marked);

/// Bisect every element `sweeps` times (with closure); parent map composes to the input mesh.
RefinementResult refine_uniform(const Mesh& mesh, int sweeps = 1);

struct Regularity {
  double gamma_shape = 0.0;   ///< max h(K)^2 / area(K)
  double gamma_degree = 1.0;  ///< max (p(K)+1)/(p(K')+1) over vertex-adjacent pairs
};

Regularity regularity_report(const Mesh& mesh, std::span<const int> degrees);

// ---------------------------------------------------------------------------
// Built-in geometries

enum class Geometry { UnitSquare, TouchingSquares, Triangle, TriangleWithHole, SlitSquare };

Geometry geometry_from_name(std::string_view name);
std::string_view to_string(Geometry g);

struct GeometryOptions {
  int grid = 4;  ///< cells per side (squares) or subdivisions per edge (triangles)
  /// Condition on each boundary segment id (see namespace boundary).
  std::array<EdgeKind, boundary::count> boundary_kinds{EdgeKind::Dirichlet, EdgeKind::Neumann,
                                                       EdgeKind::Neumann, EdgeKind::Dirichlet};
  /// Touching squares: region 1 is lower-left + upper-right when true, else the anti-diagonal pair.
  bool main_diagonal = true;
};

/// Exact polygon area of a built-in geometry.
double geometry_area(Geometry g);

Mesh build_mesh(Geometry g, const GeometryOptions& options);

} // namespace hpeig
