#include "hpeig/adaptivity.hpp"

#include "hpeig/error.hpp"
#include "hpeig/quadrature.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace hpeig {

Eigen::MatrixXd dubiner_table(int p, std::span<const double> xs, std::span<const double> ys)
{
  const int npts = static_cast<int>(xs.size());
  Eigen::MatrixXd D(npts, (p + 1) * (p + 2) / 2);
  std::vector<double> Q(p + 1), J(p + 1);
  for (int n = 0; n < npts; ++n) {
    const double x = xs[n], y = ys[n];
    const double u = 2.0 * x + y - 1.0, w = 1.0 - y, t = 2.0 * y - 1.0;
    // Q_i = w^i P_i(u / w): Legendre homogenized, regular at the collapsed vertex
    Q[0] = 1.0;
    if (p >= 1)
      Q[1] = u;
    for (int i = 2; i <= p; ++i)
      Q[i] = ((2.0 * i - 1.0) * u * Q[i - 1] - (i - 1.0) * w * w * Q[i - 2]) / i;

    int col = 0;
    for (int q = 0; q <= p; ++q) {
      for (int i = q; i >= 0; --i) {
        const int j = q - i;
        const double a = 2.0 * i + 1.0;
        // Jacobi P_j^{(a,0)}(t)
        J[0] = 1.0;
        if (j >= 1)
          J[1] = 0.5 * ((a + 2.0) * t + a);
        for (int k = 2; k <= j; ++k) {
          const double s = 2.0 * k + a;
          J[k] = ((s - 1.0) * (s * (s - 2.0) * t + a * a) * J[k - 1] -
                  2.0 * (k + a - 1.0) * (k - 1.0) * s * J[k - 2]) /
                 (2.0 * k * (k + a) * (s - 2.0));
        }
        const double norm = std::sqrt(2.0 * (2.0 * i + 1.0) * (i + j + 1.0));
        D(n, col++) = norm * Q[i] * J[j];
      }
    }
  }
  return D;
}

std::vector<double> decay_coefficients(const Space& space, const Eigen::VectorXd& phi, int k)
{
  const int p = space.degree(k);
  const auto& rule = triangle_rule(2 * p);
  const ShapeTable f = eval_function(space, phi, k, rule.x, rule.y, Derivatives::Values);
  const Eigen::MatrixXd D = dubiner_table(p, rule.x, rule.y);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.size());
  const Eigen::VectorXd c = D.transpose() * w.cwiseProduct(f.val.col(0));
  std::vector<double> a(p + 1, 0.0);
  int col = 0;
  for (int q = 0; q <= p; ++q) {
    double s = 0.0;
    for (int i = 0; i <= q; ++i, ++col)
      s += c[col] * c[col];
    a[q] = std::sqrt(s);
  }
  return a;
}

double fit_decay(std::span<const double> a, int first)
{
  const int n = static_cast<int>(a.size());
  if (first < 0 || n - first < 2)
    throw ArgumentError("fit_decay: need at least two coefficients");
  const double scale = *std::max_element(a.begin(), a.end());
  // a vanishing top coefficient means φ|_K is already a lower-degree polynomial
  if (!(scale > 0.0) || a[n - 1] <= 1e-14 * scale)
    return std::numeric_limits<double>::infinity();
  const double floor = 1e-16 * scale;
  double qm = 0.0, ym = 0.0;
  for (int q = first; q < n; ++q) {
    qm += q;
    ym += std::log(std::max(a[q], floor));
  }
  qm /= n - first;
  ym /= n - first;
  double sxy = 0.0, sxx = 0.0;
  for (int q = first; q < n; ++q) {
    sxy += (q - qm) * (std::log(std::max(a[q], floor)) - ym);
    sxx += (q - qm) * (q - qm);
  }
  return -sxy / sxx;
}

double analyticity(const Space& space, const Eigen::VectorXd& phi, int k)
{
  const auto a = decay_coefficients(space, phi, k);
  return fit_decay(a, space.degree(k) >= 3 ? 1 : 0);
}

Strategy strategy_from_name(std::string_view name)
{
  if (name == "hp")
    return Strategy::HP;
  if (name == "h")
    return Strategy::H;
  if (name == "uniform")
    return Strategy::Uniform;
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected hp, h or uniform)");
}

std::string_view to_string(Strategy s)
{
  switch (s) {
  case Strategy::HP: return "hp";
  case Strategy::H: return "h";
  case Strategy::Uniform: return "uniform";
  }
  return "?";
}

void AdaptConfig::validate() const
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw ConfigError("adapt.theta must be in (0, 1]");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw ConfigError("adapt.sigma0 must be positive");
  if (p_max < 1 || p_max > 30)
    throw ConfigError("adapt.p_max must be in [1, 30]");
  if (dof_budget < 1)
    throw ConfigError("adapt.dof_budget must be positive");
  if (max_steps < 1)
    throw ConfigError("adapt.max_steps must be positive");
  if (!(tol > 0.0))
    throw ConfigError("solver.tol must be positive");
  if (max_iter < 1)
    throw ConfigError("solver.max_iter must be positive");
}

std::vector<int> mark_fixed_fraction(std::span<const double> indicators, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw ArgumentError("mark_fixed_fraction: theta must be in (0, 1]");
  const int n = static_cast<int>(indicators.size());
  const int count = std::min(n, static_cast<int>(std::ceil(theta * n - 1e-9)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return indicators[a] > indicators[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

Action decide(double sigma, double sigma0, int degree, int p_max)
{
  if (sigma >= sigma0 && degree < p_max)
    return Action::PIncrement;
  return Action::HRefine;
}

void smooth_degrees(const Mesh& mesh, std::vector<int>& degrees)
{
  const auto nb = mesh.vertex_neighbours();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int k = 0; k < mesh.num_elements(); ++k)
      for (int n : nb[k])
        if (degrees[k] < degrees[n] - 1) {
          degrees[k] = degrees[n] - 1;
          changed = true;
        }
  }
}

Discretization apply_decision(const Discretization& d, const MarkingDecision& decision, int p_max)
{
  std::vector<int> degrees = d.degrees;
  std::vector<int> bisect;
  for (std::size_t i = 0; i < decision.marked.size(); ++i) {
    const int k = decision.marked[i];
    if (decision.actions[i] == Action::PIncrement)
      degrees[k] = std::min(p_max, degrees[k] + 1);
    else
      bisect.push_back(k);
  }
  Discretization out;
  if (bisect.empty()) {
    out.mesh = d.mesh;
    out.degrees = std::move(degrees);
  } else {
    auto r = refine(*d.mesh, bisect);
    out.degrees.resize(r.mesh.num_elements());
    for (int k = 0; k < r.mesh.num_elements(); ++k)
      out.degrees[k] = degrees[r.parent[k]];
    out.mesh = std::make_shared<const Mesh>(std::move(r.mesh));
  }
  smooth_degrees(*out.mesh, out.degrees);
  return out;
}

StepResult solve_and_estimate(const EigenProblem& problem, const Discretization& d,
                              const AdaptConfig& config)
{
  StepResult r;
  r.space = std::make_unique<Space>(d.mesh, d.degrees);
  const SparseMatrix B = assemble_stiffness(*r.space, problem.coeffs);
  const SparseMatrix M = assemble_mass(*r.space);
  EigenOptions opt;
  opt.shift = problem.shift;
  opt.tol = config.tol;
  opt.max_iter = config.max_iter;
  opt.seed = config.seed;
  const int m = problem.cluster;
  EigenCluster all = solve_lowest(B, M, m + problem.skip, opt);
  r.cluster.values = all.values.tail(m);
  r.cluster.vectors = all.vectors.rightCols(m);
  r.cluster.residuals = all.residuals.tail(m);
  r.cluster.iterations = all.iterations;
  r.indicators = estimate(*r.space, problem.coeffs, r.cluster.values, r.cluster.vectors);
  return r;
}

MarkingDecision make_decision(const StepResult& step, const AdaptConfig& config)
{
  const Indicators& ind = step.indicators;
  MarkingDecision d;
  d.marked = mark_fixed_fraction({ind.marking.data(), static_cast<std::size_t>(ind.marking.size())},
                                 config.theta);
  d.actions.reserve(d.marked.size());
  for (int k : d.marked) {
    if (config.strategy != Strategy::HP) {
      d.actions.push_back(Action::HRefine);
      continue;
    }
    // the member contributing most to this element drives the decision
    int lead = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < ind.local.cols(); ++i) {
      const double v = ind.local(k, i) / step.cluster.values[i];
      if (v > best) {
        best = v;
        lead = static_cast<int>(i);
      }
    }
    const int p = step.space->degree(k);
    const double sigma = analyticity(*step.space, step.cluster.vectors.col(lead), k);
    d.actions.push_back(decide(sigma, config.sigma0, p, config.p_max));
  }
  return d;
}

void adapt_loop(const EigenProblem& problem, const AdaptConfig& config,
                std::vector<StepRecord>& records, const StepObserver& observer)
{
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool have_ref = !problem.reference.empty();
  if (have_ref && static_cast<int>(problem.reference.size()) < problem.cluster)
    throw ArgumentError("reference spectrum shorter than the cluster");

  Discretization d = problem.initial;
  for (int step = 0;; ++step) {
    const StepResult r = solve_and_estimate(problem, d, config);
    const int m = problem.cluster;

    StepRecord rec;
    rec.step = step;
    rec.dofs = r.space->num_dofs();
    rec.elements = d.mesh->num_elements();
    rec.max_degree = r.space->max_degree();
    rec.gamma_degree = regularity_report(*d.mesh, d.degrees).gamma_degree;
    rec.lambda = r.cluster.values;
    rec.eps2 = r.indicators.totals;
    rec.total_est = r.indicators.scaled_total;
    rec.relerr = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::quiet_NaN());
    if (have_ref) {
      for (int i = 0; i < m; ++i)
        rec.relerr[i] = (rec.lambda[i] - problem.reference[i]) / rec.lambda[i];
      rec.total_err = relative_error_sum(rec.lambda, problem.reference);
      rec.effectivity = rec.total_err / rec.total_est;
    }
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(rec);
    if (observer)
      observer(StepView{records.back(), *r.space, r.cluster, r.indicators});

    if (rec.dofs >= config.dof_budget || step + 1 >= config.max_steps)
      break;

    if (config.strategy == Strategy::Uniform) {
      auto ref = refine_uniform(*d.mesh, 1);
      std::vector<int> degrees(ref.mesh.num_elements());
      for (int k = 0; k < ref.mesh.num_elements(); ++k)
        degrees[k] = d.degrees[ref.parent[k]];
      d = Discretization{std::make_shared<const Mesh>(std::move(ref.mesh)), std::move(degrees)};
    } else {
      d = apply_decision(d, make_decision(r, config), config.p_max);
    }
  }
}

} // namespace hpeig
