#include "hpeig/quadrature.hpp"

#include "hpeig/error.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace hpeig {

namespace {

/// P_n(t) and P_n'(t) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double t)
{
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (t * p1 - p0) / (t * t - 1.0)};
}

LineRule compute_gauss_line(int n)
{
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, t);
      const double dt = p / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16)
        break;
    }
    const double dp = legendre_with_derivative(n, t).second;
    rule.points[n - 1 - i] = 0.5 * (1.0 + t);
    rule.weights[n - 1 - i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return rule;
}

TriangleRule compute_triangle_rule(int n)
{
  const LineRule& g = gauss_line(n);
  TriangleRule rule;
  for (int j = 0; j < n; ++j) {
    const double eta = g.points[j];
    for (int i = 0; i < n; ++i) {
      const double xi = g.points[i];
      rule.x.push_back(xi * (1.0 - eta));
      rule.y.push_back(eta);
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - eta));
    }
  }
  return rule;
}

template <class Rule, class Make>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mutex, int n,
                   Make make)
{
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot)
    slot = std::make_unique<Rule>(make(n));
  return *slot;
}

} // namespace

const LineRule& gauss_line(int n)
{
  if (n < 1 || n > 200)
    throw ArgumentError("gauss_line: unsupported number of points");
  static std::map<int, std::unique_ptr<LineRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, compute_gauss_line);
}

const LineRule& line_rule_for_degree(int degree)
{
  return gauss_line(std::max(1, degree / 2 + 1));
}

const TriangleRule& triangle_rule(int degree)
{
  // The collapse Jacobian adds one degree in the second direction.
  const int n = std::max(1, (degree + 3) / 2);
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, compute_triangle_rule);
}

} // namespace hpeig
