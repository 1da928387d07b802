#include "hpeig/shape.hpp"

#include "hpeig/error.hpp"

namespace hpeig {

Jet operator*(const Jet& f, const Jet& g)
{
  Jet r;
  r.v = f.v * g.v;
  r.dx = f.v * g.dx + g.v * f.dx;
  r.dy = f.v * g.dy + g.v * f.dy;
  r.dxx = f.v * g.dxx + g.v * f.dxx + 2.0 * f.dx * g.dx;
  r.dxy = f.v * g.dxy + g.v * f.dxy + f.dx * g.dy + f.dy * g.dx;
  r.dyy = f.v * g.dyy + g.v * f.dyy + 2.0 * f.dy * g.dy;
  return r;
}

LegendreTable legendre_table(int n, double t)
{
  LegendreTable tab;
  tab.p.assign(n + 1, 0.0);
  tab.dp.assign(n + 1, 0.0);
  tab.d2p.assign(n + 1, 0.0);
  tab.p[0] = 1.0;
  if (n >= 1) {
    tab.p[1] = t;
    tab.dp[1] = 1.0;
  }
  for (int k = 2; k <= n; ++k) {
    tab.p[k] = ((2.0 * k - 1.0) * t * tab.p[k - 1] - (k - 1.0) * tab.p[k - 2]) / k;
    tab.dp[k] = tab.dp[k - 2] + (2.0 * k - 1.0) * tab.p[k - 1];
    tab.d2p[k] = tab.d2p[k - 2] + (2.0 * k - 1.0) * tab.dp[k - 1];
  }
  return tab;
}

Point ElementMap::to_physical(double x, double y) const
{
  const auto& [a, b, c] = vertices;
  return {a.x + x * (b.x - a.x) + y * (c.x - a.x), a.y + x * (b.y - a.y) + y * (c.y - a.y)};
}

std::array<double, 2> ElementMap::to_reference(const Point& p) const
{
  const double dx = p.x - vertices[0].x;
  const double dy = p.y - vertices[0].y;
  return {grad_lambda[1][0] * dx + grad_lambda[1][1] * dy,
          grad_lambda[2][0] * dx + grad_lambda[2][1] * dy};
}

ElementMap element_map(const Mesh& mesh, int k)
{
  ElementMap m;
  const auto& el = mesh.element(k);
  for (int i = 0; i < 3; ++i)
    m.vertices[i] = mesh.vertex(el.vertices[i]);
  const auto& [a, b, c] = m.vertices;
  const double j11 = b.x - a.x, j12 = c.x - a.x;
  const double j21 = b.y - a.y, j22 = c.y - a.y;
  const double det = j11 * j22 - j12 * j21;
  // rows of the inverse Jacobian are the gradients of lambda_1, lambda_2
  m.grad_lambda[1] = {j22 / det, -j12 / det};
  m.grad_lambda[2] = {-j21 / det, j11 / det};
  m.grad_lambda[0] = {-m.grad_lambda[1][0] - m.grad_lambda[2][0],
                      -m.grad_lambda[1][1] - m.grad_lambda[2][1]};
  m.area = 0.5 * det;
  return m;
}

int ShapeLayout::edge_offset(int j) const
{
  int offset = 3;
  for (int i = 0; i < j; ++i)
    offset += num_edge_modes(i);
  return offset;
}

ShapeLayout full_layout(int degree)
{
  ShapeLayout l;
  l.degree = degree;
  l.edge_degree = {degree, degree, degree};
  return l;
}

namespace {

Jet compose(const LegendreTable& tab, int n, const Jet& arg)
{
  // arg is affine: its Hessian vanishes
  Jet r;
  r.v = tab.p[n];
  r.dx = tab.dp[n] * arg.dx;
  r.dy = tab.dp[n] * arg.dy;
  r.dxx = tab.d2p[n] * arg.dx * arg.dx;
  r.dxy = tab.d2p[n] * arg.dx * arg.dy;
  r.dyy = tab.d2p[n] * arg.dy * arg.dy;
  return r;
}

Jet affine(double value, double gx, double gy)
{
  Jet j;
  j.v = value;
  j.dx = gx;
  j.dy = gy;
  return j;
}

} // namespace

ShapeTable eval_shapes(const ElementMap& map, const ShapeLayout& layout, std::span<const double> xs,
                       std::span<const double> ys, Derivatives derivs)
{
  if (layout.degree < 1)
    throw ArgumentError("eval_shapes: degree must be >= 1");
  const int npts = static_cast<int>(xs.size());
  const int ns = layout.size();
  const int order = static_cast<int>(derivs);

  ShapeTable t;
  t.val.resize(npts, ns);
  if (order >= 1) {
    t.dx.resize(npts, ns);
    t.dy.resize(npts, ns);
  }
  if (order >= 2) {
    t.dxx.resize(npts, ns);
    t.dxy.resize(npts, ns);
    t.dyy.resize(npts, ns);
  }

  const auto& g = map.grad_lambda;
  std::vector<Jet> shapes(ns);
  for (int q = 0; q < npts; ++q) {
    const double l1 = xs[q], l2 = ys[q];
    const std::array<Jet, 3> lam{affine(1.0 - l1 - l2, g[0][0], g[0][1]),
                                 affine(l1, g[1][0], g[1][1]), affine(l2, g[2][0], g[2][1])};
    int s = 0;
    for (int i = 0; i < 3; ++i)
      shapes[s++] = lam[i];

    for (int j = 0; j < 3; ++j) {
      const int pe = layout.edge_degree[j];
      if (pe < 2)
        continue;
      int a = (j + 1) % 3, b = (j + 2) % 3;
      if (layout.edge_reversed[j])
        std::swap(a, b);
      const Jet arg = affine(lam[b].v - lam[a].v, lam[b].dx - lam[a].dx, lam[b].dy - lam[a].dy);
      const Jet ab = lam[a] * lam[b];
      const auto tab = legendre_table(pe - 2, arg.v);
      for (int k = 2; k <= pe; ++k)
        shapes[s++] = ab * compose(tab, k - 2, arg);
    }

    if (layout.degree >= 3) {
      const int top = layout.degree - 3;
      const Jet bubble = lam[0] * lam[1] * lam[2];
      const Jet u = affine(lam[1].v - lam[0].v, lam[1].dx - lam[0].dx, lam[1].dy - lam[0].dy);
      const Jet w = affine(2.0 * lam[2].v - 1.0, 2.0 * lam[2].dx, 2.0 * lam[2].dy);
      const auto tu = legendre_table(top, u.v);
      const auto tw = legendre_table(top, w.v);
      for (int total = 0; total <= top; ++total)
        for (int i = total; i >= 0; --i)
          shapes[s++] = bubble * compose(tu, i, u) * compose(tw, total - i, w);
    }

    for (int c = 0; c < ns; ++c) {
      t.val(q, c) = shapes[c].v;
      if (order >= 1) {
        t.dx(q, c) = shapes[c].dx;
        t.dy(q, c) = shapes[c].dy;
      }
      if (order >= 2) {
        t.dxx(q, c) = shapes[c].dxx;
        t.dxy(q, c) = shapes[c].dxy;
        t.dyy(q, c) = shapes[c].dyy;
      }
    }
  }
  return t;
}

PointShapes eval_basis(const ElementMap& map, const ShapeLayout& layout, double x, double y)
{
  const double xs[] = {x};
  const double ys[] = {y};
  auto t = eval_shapes(map, layout, xs, ys, Derivatives::Gradients);
  PointShapes r;
  r.values = t.val.row(0).transpose();
  r.gradients.resize(layout.size(), 2);
  r.gradients.col(0) = t.dx.row(0).transpose();
  r.gradients.col(1) = t.dy.row(0).transpose();
  return r;
}

} // namespace hpeig
