#include "hpeig/reference.hpp"

#include "hpeig/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hpeig {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

constexpr double pi = std::numbers::pi;
constexpr double pi2 = pi * pi;

std::vector<double> lowest_of(int count, int max_index, int first,
                              double (*f)(int, int))
{
  if (count < 0)
    throw ArgumentError("eigenvalue count must be nonnegative");
  std::vector<double> all;
  for (int i = first; i <= max_index; ++i)
    for (int j = first; j <= max_index; ++j)
      if (i + j > 0)
        all.push_back(f(i, j));
  std::sort(all.begin(), all.end());
  if (static_cast<int>(all.size()) < count)
    throw ArgumentError("too many eigenvalues requested");
  all.resize(count);
  return all;
}

int enumeration_bound(int count)
{
  // all pairs with i^2 + j^2 below the count-th value lie inside this square
  return static_cast<int>(std::ceil(2.0 * std::sqrt(count + 1.0))) + 2;
}

ReferenceSpectrum from_values(std::vector<double> values, int digits, Provenance prov)
{
  ReferenceSpectrum s;
  for (double v : values) {
    if (!s.entries.empty() && std::abs(s.entries.back().value - v) <= 1e-12 * v)
      ++s.entries.back().multiplicity;
    else
      s.entries.push_back({v, 1, digits, prov});
  }
  return s;
}

// Lowest eigenvalues of the unit disk slit along the positive x-axis: squares of
// the first roots of J_{(2k-1)/4}, k = 1..5, and the second root for k = 1.
const double slit_disk_table[] = {
    7.73333653346596686390263803337, 12.1871394680951290047505723560,
    17.3507761313694859586686502730, 23.1993865387331719385298116070,
    29.7145342842106938075714690649, 34.8825215790904790430911907100};

} // namespace

std::string_view to_string(Provenance p)
{
  switch (p) {
  case Provenance::Exact: return "exact";
  case Provenance::Published: return "published";
  case Provenance::SelfComputed: return "computed";
  }
  return "?";
}

std::vector<double> ReferenceSpectrum::values(int count) const
{
  std::vector<double> out;
  for (const auto& e : entries)
    for (int r = 0; r < e.multiplicity && static_cast<int>(out.size()) < count; ++r)
      out.push_back(e.value);
  if (static_cast<int>(out.size()) < count)
    throw ArgumentError("reference spectrum has only " + std::to_string(out.size()) +
                        " eigenvalues, " + std::to_string(count) + " requested");
  return out;
}

int ReferenceSpectrum::size() const
{
  int n = 0;
  for (const auto& e : entries)
    n += e.multiplicity;
  return n;
}

double square_dirichlet(int i, int j)
{
  if (i < 1 || j < 1)
    throw ArgumentError("square_dirichlet: indices must be positive");
  return pi2 * (i * i + j * j);
}

double triangle_dirichlet(int m, int n)
{
  if (m < 1 || n < 1)
    throw ArgumentError("triangle_dirichlet: indices must be positive");
  return 16.0 * pi2 / 9.0 * (m * m + m * n + n * n);
}

std::vector<double> square_dirichlet_lowest(int count)
{
  return lowest_of(count, enumeration_bound(count), 1, square_dirichlet);
}

std::vector<double> square_neumann_lowest(int count)
{
  return lowest_of(count, enumeration_bound(count), 0,
                   [](int i, int j) { return pi2 * (i * i + j * j); });
}

std::vector<double> triangle_dirichlet_lowest(int count)
{
  return lowest_of(count, enumeration_bound(count), 1, triangle_dirichlet);
}

double bessel_j(double nu, double x)
{
  if (!(nu >= -0.5))
    throw ArgumentError("bessel_j: order must be >= -1/2");
  if (!(x >= 0.0 && x <= 60.0))
    throw ArgumentError("bessel_j: argument outside [0, 60]");
  if (x == 0.0) {
    if (nu == 0.0)
      return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  // J_ν(x) = (x/2)^ν / Γ(ν+1) · Σ_s (−x²/4)^s / (s! (ν+1)_s)
  const Real z = -Real(x) * Real(x) / 4;
  Real term = 1, sum = 1;
  for (int s = 1; s < 1000; ++s) {
    term *= z / (Real(s) * (Real(s) + Real(nu)));
    sum += term;
    if (s > x && abs(term) < Real(1e-18) * abs(sum))
      break;
  }
  return static_cast<double>(sum) * std::pow(x / 2.0, nu) / std::tgamma(nu + 1.0);
}

double bessel_root(double nu, int m)
{
  if (!(nu >= -0.5 && nu <= 5.0))
    throw ArgumentError("bessel_root: order outside [-1/2, 5]");
  if (m < 1 || m > 10)
    throw ArgumentError("bessel_root: root index outside [1, 10]");
  const double step = 0.1;
  double a = step, fa = bessel_j(nu, a);
  int found = 0;
  for (int n = 2; n <= 600; ++n) {
    const double b = n * step, fb = bessel_j(nu, b);
    if (fa == 0.0 && ++found == m)
      return a;
    if (fa * fb < 0.0 && ++found == m) {
      double lo = a, hi = b, flo = fa;
      while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
          break;
        const double fm = bessel_j(nu, mid);
        if (fm == 0.0)
          return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  throw ArgumentError("bessel_root: fewer than " + std::to_string(m) + " roots in (0, 60]");
}

ReferenceSpectrum registry(std::string_view key, double parameter)
{
  const auto published = Provenance::Published;
  if (key == "square_dirichlet")
    return from_values(square_dirichlet_lowest(12), 15, Provenance::Exact);
  if (key == "square_neumann")
    return from_values(square_neumann_lowest(12), 15, Provenance::Exact);
  if (key == "triangle")
    return from_values(triangle_dirichlet_lowest(12), 15, Provenance::Exact);
  if (key == "triangle_hole")
    return from_values({40.4650426, 43.4868466, 43.4868466}, 6, published);
  if (key == "reaction") {
    if (parameter == 10.0)
      return from_values({4.150242455, 10.706070962, 18.779725462, 25.150325247}, 8, published);
    if (parameter == 100.0)
      return from_values({13.210576406, 13.990033964, 60.294151672, 64.840268299}, 8, published);
    throw ArgumentError("reaction references exist for kappa = 10 and 100 only");
  }
  if (key == "diffusion") {
    if (parameter == 10.0)
      return from_values({64.226529416, 75.028156269, 141.161506328}, 8, published);
    if (parameter == 100.0)
      return from_values({77.800981966, 78.564198245, 193.916538067}, 8, published);
    throw ArgumentError("diffusion references exist for a = 10 and 100 only");
  }
  if (key == "slit_square") {
    ReferenceSpectrum s;
    s.entries = {{20.739208802, 1, 8, published},
                 {34.485320, 1, 5, published},
                 {50.348022005, 1, 8, published},
                 {67.581165196, 1, 8, published}};
    return s;
  }
  if (key == "slit_disk") {
    ReferenceSpectrum s;
    for (double v : slit_disk_table)
      s.entries.push_back({v, 1, 15, published});
    return s;
  }
  if (key == "slit_circle_second")
    return from_values({9.869604401089358619}, 15, published);
  throw ArgumentError("no reference spectrum for '" + std::string(key) + "'");
}

std::vector<ReferenceCheck> verify_references()
{
  std::vector<ReferenceCheck> out;
  auto add = [&](std::string name, double computed, double expected, double tol) {
    const double rel = std::abs(computed - expected) / std::abs(expected);
    out.push_back({std::move(name), computed, expected, rel, tol, rel <= tol});
  };

  // slit disk: λ_km = z_km² with z_km the m-th root of J_{(2k-1)/4}
  const int ks[] = {1, 2, 3, 4, 5, 1};
  const int ms[] = {1, 1, 1, 1, 1, 2};
  for (int n = 0; n < 6; ++n) {
    const double z = bessel_root((2.0 * ks[n] - 1.0) / 4.0, ms[n]);
    add("slit_disk k=" + std::to_string(ks[n]) + " m=" + std::to_string(ms[n]), z * z,
        slit_disk_table[n], 1e-11);
  }
  const double z = bessel_root(0.5, 1);
  add("slit_circle_second = pi^2", z * z, registry("slit_circle_second").entries[0].value, 1e-15);
  add("first root of J_1/2 = pi", z, pi, 1e-15);

  // half-integer orders against closed forms
  double worst12 = 0.0, worst32 = 0.0;
  for (double x = 0.1; x <= 40.0; x += 0.1) {
    const double c = std::sqrt(2.0 / (pi * x));
    const double j12 = c * std::sin(x);
    const double j32 = c * (std::sin(x) / x - std::cos(x));
    // relative to the local envelope, since the closed forms vanish at their roots
    worst12 = std::max(worst12, std::abs(bessel_j(0.5, x) - j12) / c);
    worst32 = std::max(worst32, std::abs(bessel_j(1.5, x) - j32) / c);
  }
  out.push_back({"J_1/2 vs closed form on [0.1, 40]", worst12, 0.0, worst12, 1e-12, worst12 <= 1e-12});
  out.push_back({"J_3/2 vs closed form on [0.1, 40]", worst32, 0.0, worst32, 1e-12, worst32 <= 1e-12});
  add("J_0 first zero", bessel_root(0.0, 1), 2.404825557695773, 1e-14);

  add("square (1,1) = 2 pi^2", square_dirichlet(1, 1), 19.7392088021787172, 1e-15);
  add("triangle (1,1) = 16 pi^2 / 3", triangle_dirichlet(1, 1), 52.6378901391432459, 1e-15);
  add("triangle 4th = 192 pi^2 / 9", triangle_dirichlet_lowest(4)[3],
      192.0 * pi2 / 9.0, 1e-15);

  // published slit-square values that closed forms also cover: 2π² + 1 and 5π² + 1
  const auto slit = registry("slit_square");
  add("slit_square 1st = 2 pi^2 + 1", 2.0 * pi2 + 1.0, slit.entries[0].value,
      std::pow(10.0, -slit.entries[0].digits) / slit.entries[0].value);
  add("slit_square 3rd = 5 pi^2 + 1", 5.0 * pi2 + 1.0, slit.entries[2].value,
      std::pow(10.0, -slit.entries[2].digits) / slit.entries[2].value);
  return out;
}

} // namespace hpeig
