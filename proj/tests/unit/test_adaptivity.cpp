#include "hpeig/adaptivity.hpp"
#include "hpeig/error.hpp"
#include "hpeig/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

using namespace hpeig;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::shared_ptr<const Mesh> square(int grid, EdgeKind kind)
{
  GeometryOptions o;
  o.grid = grid;
  o.boundary_kinds.fill(kind);
  return std::make_shared<const Mesh>(build_mesh(Geometry::UnitSquare, o));
}

EigenProblem square_problem(int grid, int p)
{
  EigenProblem prob;
  prob.name = "square";
  const auto m = square(grid, EdgeKind::Dirichlet);
  prob.initial = {m, std::vector<int>(m->num_elements(), p)};
  prob.cluster = 4;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  prob.reference = {2 * pi2, 5 * pi2, 5 * pi2, 8 * pi2};
  return prob;
}

int max_vertex_jump(const Mesh& mesh, std::span<const int> degrees)
{
  int jump = 0;
  const auto nb = mesh.vertex_neighbours();
  for (int k = 0; k < mesh.num_elements(); ++k)
    for (int n : nb[k])
      jump = std::max(jump, std::abs(degrees[k] - degrees[n]));
  return jump;
}

} // namespace

TEST_CASE("fixed-fraction marking")
{
  const std::vector<double> a{4, 3, 2, 1};
  CHECK(mark_fixed_fraction(a, 1.0) == std::vector<int>{0, 1, 2, 3});
  CHECK(mark_fixed_fraction(a, 0.5) == std::vector<int>{0, 1});
  const std::vector<double> b{1, 3, 2, 4};
  CHECK(mark_fixed_fraction(b, 0.5) == std::vector<int>{1, 3});
  CHECK(mark_fixed_fraction(b, 0.3) == std::vector<int>{1, 3});
  const std::vector<double> flat(8, 1.0);
  CHECK(mark_fixed_fraction(flat, 0.25) == std::vector<int>{0, 1});
  CHECK_THROWS_AS((void)mark_fixed_fraction(a, 0.0), ArgumentError);
  CHECK_THROWS_AS((void)mark_fixed_fraction(a, 1.5), ArgumentError);
}

TEST_CASE("Dubiner basis is orthonormal on the reference triangle")
{
  for (int p : {1, 4, 9}) {
    const auto& rule = triangle_rule(2 * p);
    const Eigen::MatrixXd D = dubiner_table(p, rule.x, rule.y);
    const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.size());
    const Eigen::MatrixXd G = D.transpose() * w.asDiagonal() * D;
    CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Dubiner basis spans polynomials by total degree")
{
  // x^a y^b with a + b = q lies in the span of the first (q+1)(q+2)/2 columns
  const int p = 5;
  const auto& rule = triangle_rule(2 * p);
  const Eigen::MatrixXd D = dubiner_table(p, rule.x, rule.y);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.size());
  for (int a = 0; a <= p; ++a)
    for (int b = 0; a + b <= p; ++b) {
      Eigen::VectorXd f(rule.size());
      for (int q = 0; q < rule.size(); ++q)
        f[q] = std::pow(rule.x[q], a) * std::pow(rule.y[q], b);
      const Eigen::VectorXd c = D.transpose() * w.cwiseProduct(f);
      const int head = (a + b + 1) * (a + b + 2) / 2;
      CHECK(c.tail(c.size() - head).cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("decay fit")
{
  std::vector<double> geo(8);
  for (int q = 0; q < 8; ++q)
    geo[q] = std::exp(-2.0 * q);
  CHECK(std::abs(fit_decay(geo, 0) - 2.0) <= 1e-10);
  CHECK(std::abs(fit_decay(geo, 1) - 2.0) <= 1e-10);

  for (int p = 4; p <= 10; ++p) {
    std::vector<double> alg(p + 1);
    alg[0] = 1.0;
    for (int q = 1; q <= p; ++q)
      alg[q] = 1.0 / (q * q);
    CHECK(fit_decay(alg, 1) < 1.0);
  }

  CHECK(fit_decay(std::vector<double>{1.0, 0.5, 0.0, 0.0}, 1) == inf);
  CHECK(fit_decay(std::vector<double>{0.0, 0.0, 0.0}) == inf);
  CHECK_THROWS_AS((void)fit_decay(std::vector<double>{1.0}), ArgumentError);
}

TEST_CASE("analyticity of discrete functions")
{
  const auto m = square(2, EdgeKind::Neumann);
  const Space s(m, std::vector<int>(m->num_elements(), 3));
  const Eigen::VectorXd lin = interpolate(s, [](const Point& p) { return 2.0 * p.x - p.y; });
  for (int k = 0; k < m->num_elements(); ++k)
    CHECK(analyticity(s, lin, k) == inf);

  const Space s6(m, std::vector<int>(m->num_elements(), 6));
  const Eigen::VectorXd smooth = interpolate(s6, [](const Point& p) { return std::exp(p.x + p.y); });
  const Eigen::VectorXd rough =
      interpolate(s6, [](const Point& p) { return std::pow(std::hypot(p.x, p.y) + 1e-300, 2.0 / 3.0); });
  // the corner element of the rough function decays much more slowly
  int corner = -1;
  for (int k = 0; k < m->num_elements(); ++k)
    for (int v : m->element(k).vertices)
      if (m->vertex(v).x == 0.0 && m->vertex(v).y == 0.0)
        corner = k;
  REQUIRE(corner >= 0);
  CHECK(analyticity(s6, smooth, corner) > 1.5);
  CHECK(analyticity(s6, rough, corner) < analyticity(s6, smooth, corner));
}

TEST_CASE("hp decision")
{
  CHECK(decide(inf, 1.0, 3, 10) == Action::PIncrement);
  CHECK(decide(0.1, 1.0, 3, 10) == Action::HRefine);
  CHECK(decide(5.0, 1.0, 10, 10) == Action::HRefine);
  CHECK(decide(1.0, 1.0, 2, 10) == Action::PIncrement);
}

TEST_CASE("degree smoothing")
{
  const auto m = square(4, EdgeKind::Dirichlet);
  std::vector<int> deg(m->num_elements(), 1);
  deg[7] = 6;
  smooth_degrees(*m, deg);
  CHECK(max_vertex_jump(*m, deg) <= 1);
  CHECK(deg[7] == 6);
  CHECK(regularity_report(*m, deg).gamma_degree <= 2.0);
}

TEST_CASE("apply_decision: p increments and bisection")
{
  const auto m = square(2, EdgeKind::Dirichlet);
  const Discretization d{m, std::vector<int>(m->num_elements(), 2)};
  MarkingDecision dec;
  dec.marked = {0, 3};
  dec.actions = {Action::PIncrement, Action::HRefine};
  const Discretization out = apply_decision(d, dec, 10);
  CHECK(out.mesh->num_elements() > m->num_elements());
  CHECK(max_vertex_jump(*out.mesh, out.degrees) <= 1);
  const Space before(d.mesh, d.degrees), after(out.mesh, out.degrees);
  CHECK(after.num_dofs() > before.num_dofs());

  MarkingDecision cap;
  cap.marked = {1};
  cap.actions = {Action::PIncrement};
  const Discretization same = apply_decision(d, cap, 2);
  CHECK(same.degrees == d.degrees);
}

TEST_CASE("config validation")
{
  AdaptConfig c;
  CHECK_NOTHROW(c.validate());
  c.theta = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = AdaptConfig{};
  c.p_max = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(strategy_from_name("uniform") == Strategy::Uniform);
  CHECK_THROWS_AS((void)strategy_from_name("hq"), ConfigError);
}

TEST_CASE("budget below the initial dofs gives a single record")
{
  const EigenProblem prob = square_problem(4, 2);
  AdaptConfig c;
  c.dof_budget = 10;
  std::vector<StepRecord> rec;
  adapt_loop(prob, c, rec);
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].step == 0);
  CHECK(rec[0].dofs == Space(prob.initial.mesh, prob.initial.degrees).num_dofs());
}

TEST_CASE("adaptive loop invariants on the square")
{
  const EigenProblem prob = square_problem(4, 2);
  for (Strategy strat : {Strategy::HP, Strategy::H, Strategy::Uniform}) {
    CAPTURE(to_string(strat));
    AdaptConfig c;
    c.strategy = strat;
    c.dof_budget = 2500;
    std::vector<StepRecord> rec;
    int worst_jump = 0;
    adapt_loop(prob, c, rec, [&](const StepView& v) {
      worst_jump = std::max(worst_jump, max_vertex_jump(v.space.mesh(), v.space.degrees()));
    });
    REQUIRE(rec.size() >= 3);
    CHECK(worst_jump <= 1);
    for (std::size_t s = 1; s < rec.size(); ++s) {
      CHECK(rec[s].dofs > rec[s - 1].dofs);
      for (int i = 0; i < 4; ++i) {
        CHECK(rec[s].lambda[i] <= rec[s - 1].lambda[i] * (1 + 1e-12));
        CHECK(rec[s].lambda[i] >= prob.reference[i] * (1 - 1e-12));
      }
      CHECK(rec[s].seconds >= rec[s - 1].seconds);
    }
    CHECK(rec.back().total_err < rec.front().total_err);
    CHECK(rec.back().total_est < rec.front().total_est);
    CHECK(rec.back().dofs >= c.dof_budget);
  }
}

TEST_CASE("adaptive loop is deterministic")
{
  const EigenProblem prob = square_problem(3, 2);
  AdaptConfig c;
  c.dof_budget = 1500;
  std::vector<StepRecord> a, b;
  adapt_loop(prob, c, a);
  adapt_loop(prob, c, b);
  REQUIRE(a.size() == b.size());
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].dofs == b[s].dofs);
    CHECK(a[s].lambda == b[s].lambda);
    CHECK(a[s].eps2 == b[s].eps2);
    CHECK(a[s].total_est == b[s].total_est);
  }
}

TEST_CASE("hp loop raises degrees on a smooth problem")
{
  const EigenProblem prob = square_problem(4, 2);
  AdaptConfig c;
  c.dof_budget = 3000;
  std::vector<StepRecord> rec;
  adapt_loop(prob, c, rec);
  CHECK(rec.back().max_degree > 2);
}
