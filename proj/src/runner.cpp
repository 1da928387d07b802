#include "hpeig/runner.hpp"

#include "hpeig/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace hpeig {

namespace {

std::string fmt(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_param(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

ProblemSpec square(bool neumann)
{
  ProblemSpec s;
  s.name = neumann ? "square_neumann" : "square_dirichlet";
  s.geometry = Geometry::UnitSquare;
  s.mesh.boundary_kinds.fill(neumann ? EdgeKind::Neumann : EdgeKind::Dirichlet);
  s.reference_key = s.name;
  if (neumann) {
    s.skip = 1;
    s.shift = -1.0;
  }
  return s;
}

ProblemSpec triangle(bool hole)
{
  ProblemSpec s;
  s.name = hole ? "triangle_hole" : "triangle";
  s.geometry = hole ? Geometry::TriangleWithHole : Geometry::Triangle;
  s.mesh.boundary_kinds.fill(EdgeKind::Dirichlet);
  s.reference_key = s.name;
  if (hole)
    s.cluster = 3;
  return s;
}

ProblemSpec slit_square()
{
  ProblemSpec s;
  s.name = "slit_square";
  s.geometry = Geometry::SlitSquare;
  s.coeffs.regions[0].c = 1.0;
  s.reference_key = "slit_square";
  return s;
}

bool has_reference(std::string_view family, double param)
{
  return (family == "reaction" || family == "diffusion") && (param == 10.0 || param == 100.0);
}

// ---------------------------------------------------------------------------
// config text

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry, std::less<>>;

std::string_view trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
public:
  Reader(std::string_view text, std::string origin) : origin_(std::move(origin))
  {
    static const std::map<std::string, std::vector<std::string>, std::less<>> allowed = {
        {"problem", {"name", "grid", "degree", "cluster", "kappa", "a", "diagonal", "orientation"}},
        {"adapt", {"theta", "sigma0", "p_max", "dof_budget", "max_steps", "strategy"}},
        {"solver", {"tol", "max_iter", "seed"}},
        {"oracle", {"mode", "levels", "sweeps", "extra_degree", "max_fine_dofs"}},
    };
    std::string section;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      if (const auto c = line.find_first_of("#;"); c != std::string_view::npos)
        line = line.substr(0, c);
      line = trim(line);
      if (line.empty())
        continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(lineno, "malformed section header");
        section = std::string(trim(line.substr(1, line.size() - 2)));
        if (!allowed.count(section))
          fail(lineno, "unknown section [" + section + "]");
        sections_[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        fail(lineno, "expected key = value");
      if (section.empty())
        fail(lineno, "key outside of any section");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      const auto& keys = allowed.find(section)->second;
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        fail(lineno, "unknown key '" + key + "' in [" + section + "]");
      if (value.empty())
        fail(lineno, "empty value for " + section + "." + key);
      auto [it, fresh] = sections_[section].emplace(key, Entry{value, lineno});
      if (!fresh)
        fail(lineno, "duplicate key " + section + "." + key + " (first set on line " +
                         std::to_string(it->second.line) + ")");
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const
  {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  const Entry* find(std::string_view section, std::string_view key) const
  {
    const auto s = sections_.find(section);
    if (s == sections_.end())
      return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  std::optional<std::string> text(std::string_view section, std::string_view key) const
  {
    const Entry* e = find(section, key);
    return e ? std::optional(e->value) : std::nullopt;
  }

  template <class T>
  std::optional<T> number(std::string_view section, std::string_view key) const
  {
    const Entry* e = find(section, key);
    if (!e)
      return std::nullopt;
    T v{};
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last)
      fail(e->line, std::string(section) + "." + std::string(key) + ": '" + e->value +
                        "' is not a valid number");
    if constexpr (std::is_floating_point_v<T>)
      if (!std::isfinite(v))
        fail(e->line, std::string(section) + "." + std::string(key) + " must be finite");
    return v;
  }

  int line_of(std::string_view section, std::string_view key) const
  {
    const Entry* e = find(section, key);
    return e ? e->line : 0;
  }

  [[noreturn]] void invalid(std::string_view section, std::string_view key, const std::string& msg) const
  {
    const int line = line_of(section, key);
    const std::string where = line > 0 ? origin_ + ":" + std::to_string(line) + ": " : origin_ + ": ";
    throw ConfigError(where + std::string(section) + "." + std::string(key) + ": " + msg);
  }

private:
  std::string origin_;
  std::map<std::string, Section, std::less<>> sections_;
};

} // namespace

// ---------------------------------------------------------------------------
// Problems

void ProblemSpec::validate() const
{
  if (cluster < 1)
    throw ConfigError("problem.cluster must be >= 1");
  if (skip < 0)
    throw ConfigError("problem.skip must be >= 0");
  if (degree < 1)
    throw ConfigError("problem.degree must be >= 1");
  if (mesh.grid < 1)
    throw ConfigError("problem.grid must be >= 1");
  if ((geometry == Geometry::TouchingSquares || geometry == Geometry::SlitSquare) && mesh.grid % 2)
    throw ConfigError("problem.grid must be even for " + std::string(to_string(geometry)));
  if (geometry == Geometry::TriangleWithHole && mesh.grid % 4)
    throw ConfigError("problem.grid must be a multiple of 4 for triangle_hole");
  const std::size_t regions = geometry == Geometry::TouchingSquares ? 2 : 1;
  if (coeffs.regions.size() < regions)
    throw ConfigError("problem: coefficients do not cover every region");
  try {
    coeffs.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("problem coefficients: ") + e.what());
  }
}

std::vector<ProblemInfo> registry_problems()
{
  return {
      {"square_dirichlet", "-Δu = λu on (0,1)², Dirichlet"},
      {"square_neumann", "-Δu = λu on (0,1)², Neumann, zero mode skipped"},
      {"triangle", "-Δu = λu on the unit equilateral triangle, Dirichlet"},
      {"triangle_hole", "-Δu = λu on a triangle of side 2 with a concentric triangular hole of side 1/2"},
      {"reaction_kappa10", "-Δu + 10χ₁u = λu on (0,1)², Neumann, χ₁ = lower-left and upper-right quadrants"},
      {"reaction_kappa100", "-Δu + 100χ₁u = λu on (0,1)², Neumann"},
      {"diffusion_a10", "-∇·(10χ₁ + χ₂)∇u = λu on (0,1)², Dirichlet"},
      {"diffusion_a100", "-∇·(100χ₁ + χ₂)∇u = λu on (0,1)², Dirichlet"},
      {"slit_square", "-Δu + u = λu on (0,1)² slit along y = 1/2 from the centre to the right edge"},
  };
}

ProblemSpec reaction_problem(double kappa)
{
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw ConfigError("problem.kappa must be finite and >= 0");
  ProblemSpec s;
  s.name = "reaction";
  s.geometry = Geometry::TouchingSquares;
  s.mesh.boundary_kinds.fill(EdgeKind::Neumann);
  s.coeffs.regions.resize(2);
  s.coeffs.regions[1].c = kappa;
  if (kappa == 0.0) {
    s.skip = 1;
    s.shift = -1.0;
  }
  if (has_reference("reaction", kappa)) {
    s.reference_key = "reaction";
    s.reference_param = kappa;
  }
  return s;
}

ProblemSpec diffusion_problem(double a)
{
  if (!(a > 0.0) || !std::isfinite(a))
    throw ConfigError("problem.a must be finite and > 0");
  ProblemSpec s;
  s.name = "diffusion";
  s.geometry = Geometry::TouchingSquares;
  s.mesh.boundary_kinds.fill(EdgeKind::Dirichlet);
  s.coeffs.regions.resize(2);
  s.coeffs.regions[1].A *= a;
  s.cluster = 3;
  if (has_reference("diffusion", a)) {
    s.reference_key = "diffusion";
    s.reference_param = a;
  }
  return s;
}

ProblemSpec problem_spec(std::string_view key)
{
  ProblemSpec s;
  if (key == "square_dirichlet" || key == "square_neumann")
    s = square(key == "square_neumann");
  else if (key == "triangle" || key == "triangle_hole")
    s = triangle(key == "triangle_hole");
  else if (key == "slit_square")
    s = slit_square();
  else if (key == "reaction" || key == "reaction_kappa10")
    s = reaction_problem(10.0);
  else if (key == "reaction_kappa100")
    s = reaction_problem(100.0);
  else if (key == "diffusion" || key == "diffusion_a10")
    s = diffusion_problem(10.0);
  else if (key == "diffusion_a100")
    s = diffusion_problem(100.0);
  else
    throw ConfigError("unknown problem '" + std::string(key) + "' (see list-problems)");
  s.name = std::string(key);
  return s;
}

std::vector<double> cluster_reference(const ProblemSpec& spec)
{
  if (spec.reference_key.empty())
    return {};
  const auto ref = registry(spec.reference_key, spec.reference_param);
  if (ref.size() < spec.skip + spec.cluster)
    return {};
  auto v = ref.values(spec.skip + spec.cluster);
  v.erase(v.begin(), v.begin() + spec.skip);
  return v;
}

std::optional<std::vector<double>> exact_spectrum(const ProblemSpec& spec, int count)
{
  if (spec.reference_key.empty())
    return std::nullopt;
  const auto ref = registry(spec.reference_key, spec.reference_param);
  if (ref.size() < spec.skip + count)
    return std::nullopt;
  for (const auto& e : ref.entries)
    if (e.provenance != Provenance::Exact)
      return std::nullopt;
  auto v = ref.values(spec.skip + count);
  v.erase(v.begin(), v.begin() + spec.skip);
  return v;
}

EigenProblem make_problem(const ProblemSpec& spec)
{
  spec.validate();
  EigenProblem p;
  p.name = spec.name;
  auto mesh = std::make_shared<const Mesh>(build_mesh(spec.geometry, spec.mesh));
  p.initial = Discretization{mesh, std::vector<int>(mesh->num_elements(), spec.degree)};
  p.coeffs = spec.coeffs;
  p.cluster = spec.cluster;
  p.skip = spec.skip;
  p.shift = spec.shift;
  p.reference = cluster_reference(spec);
  return p;
}

// ---------------------------------------------------------------------------
// Configuration

StudyConfig parse_config(std::string_view text, const std::string& origin)
{
  const Reader r(text, origin);
  StudyConfig cfg;

  const auto name = r.text("problem", "name");
  if (!name)
    throw ConfigError(origin + ": missing [problem] name");
  try {
    cfg.problem = problem_spec(*name);
  } catch (const ConfigError& e) {
    r.invalid("problem", "name", e.what());
  }
  ProblemSpec& p = cfg.problem;

  const bool reaction = p.name.rfind("reaction", 0) == 0;
  const bool diffusion = p.name.rfind("diffusion", 0) == 0;
  if (const auto kappa = r.number<double>("problem", "kappa")) {
    if (!reaction)
      r.invalid("problem", "kappa", "only applies to reaction problems");
    if (*kappa < 0.0)
      r.invalid("problem", "kappa", "must be >= 0 (the reaction coefficient c = κ must be nonnegative)");
    p = reaction_problem(*kappa);
    p.name = has_reference("reaction", *kappa) ? "reaction_kappa" + fmt_param(*kappa) : "reaction";
  }
  if (const auto a = r.number<double>("problem", "a")) {
    if (!diffusion)
      r.invalid("problem", "a", "only applies to diffusion problems");
    if (*a <= 0.0)
      r.invalid("problem", "a", "must be > 0");
    p = diffusion_problem(*a);
    p.name = has_reference("diffusion", *a) ? "diffusion_a" + fmt_param(*a) : "diffusion";
  }
  if (const auto g = r.number<int>("problem", "grid"))
    p.mesh.grid = *g;
  if (const auto d = r.number<int>("problem", "degree"))
    p.degree = *d;
  if (const auto m = r.number<int>("problem", "cluster"))
    p.cluster = *m;
  if (const auto diag = r.text("problem", "diagonal")) {
    if (p.geometry != Geometry::TouchingSquares)
      r.invalid("problem", "diagonal", "only applies to the touching-squares problems");
    if (*diag == "main")
      p.mesh.main_diagonal = true;
    else if (*diag == "anti")
      p.mesh.main_diagonal = false;
    else
      r.invalid("problem", "diagonal", "expected 'main' or 'anti'");
  }
  if (const auto o = r.text("problem", "orientation")) {
    if (p.geometry != Geometry::TriangleWithHole)
      r.invalid("problem", "orientation", "only applies to triangle_hole");
    if (*o != "up")
      r.invalid("problem", "orientation", "only 'up' (hole oriented like the outer triangle) is supported");
  }

  AdaptConfig& a = cfg.adapt;
  if (const auto v = r.number<double>("adapt", "theta"))
    a.theta = *v;
  if (const auto v = r.number<double>("adapt", "sigma0"))
    a.sigma0 = *v;
  if (const auto v = r.number<int>("adapt", "p_max"))
    a.p_max = *v;
  if (const auto v = r.number<int>("adapt", "dof_budget"))
    a.dof_budget = *v;
  if (const auto v = r.number<int>("adapt", "max_steps"))
    a.max_steps = *v;
  if (const auto v = r.text("adapt", "strategy")) {
    try {
      a.strategy = strategy_from_name(*v);
    } catch (const Error& e) {
      r.invalid("adapt", "strategy", e.what());
    }
  }
  if (const auto v = r.number<double>("solver", "tol"))
    a.tol = *v;
  if (const auto v = r.number<int>("solver", "max_iter"))
    a.max_iter = *v;
  if (const auto v = r.number<std::uint64_t>("solver", "seed"))
    a.seed = *v;

  OracleConfig& o = cfg.oracle;
  if (const auto v = r.text("oracle", "mode")) {
    if (*v == "adaptive")
      o.mode = OracleMode::Adaptive;
    else if (*v == "uniform")
      o.mode = OracleMode::Uniform;
    else
      r.invalid("oracle", "mode", "expected 'adaptive' or 'uniform'");
  }
  if (const auto v = r.number<int>("oracle", "levels"))
    o.levels = *v;
  if (const auto v = r.number<int>("oracle", "sweeps"))
    o.fine.sweeps = *v;
  if (const auto v = r.number<int>("oracle", "extra_degree"))
    o.fine.extra_degree = *v;
  if (const auto v = r.number<int>("oracle", "max_fine_dofs"))
    o.max_fine_dofs = *v;

  // field-level validation, reported against the line that set the value
  try {
    a.validate();
  } catch (const Error& e) {
    throw ConfigError(origin + ": [adapt]/[solver]: " + e.what());
  }
  if (p.cluster < 1)
    r.invalid("problem", "cluster", "must be >= 1");
  if (p.degree < 1 || p.degree > a.p_max)
    r.invalid("problem", "degree", "must lie in [1, adapt.p_max]");
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (o.levels < 1)
    r.invalid("oracle", "levels", "must be >= 1");
  if (o.fine.sweeps < 0)
    r.invalid("oracle", "sweeps", "must be >= 0");
  if (o.fine.extra_degree < 0)
    r.invalid("oracle", "extra_degree", "must be >= 0");
  if (o.fine.sweeps == 0 && o.fine.extra_degree == 0)
    r.invalid("oracle", "extra_degree", "the surrogate must be finer than the coarse space");
  if (o.max_fine_dofs < 1)
    r.invalid("oracle", "max_fine_dofs", "must be >= 1");
  return cfg;
}

StudyConfig load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Output

std::string csv_header(int m)
{
  std::string h = "step,dofs,sqrt_dofs";
  for (const char* col : {"lambda_", "relerr_", "eps2_"})
    for (int i = 1; i <= m; ++i)
      h += "," + std::string(col) + std::to_string(i);
  h += ",total_est,total_err,effectivity,seconds";
  return h;
}

std::string csv_row(const StepRecord& rec, bool timing)
{
  std::string s = std::to_string(rec.step) + "," + std::to_string(rec.dofs) + "," +
                  fmt(std::sqrt(static_cast<double>(rec.dofs)));
  for (const Eigen::VectorXd* v : {&rec.lambda, &rec.relerr, &rec.eps2})
    for (Eigen::Index i = 0; i < v->size(); ++i)
      s += "," + fmt((*v)[i]);
  s += "," + fmt(rec.total_est) + "," + fmt(rec.total_err) + "," + fmt(rec.effectivity) + "," +
       fmt(timing ? rec.seconds : 0.0);
  return s;
}

void write_vtk(std::ostream& out, const Space& space,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& cell_fields)
{
  const Mesh& mesh = space.mesh();
  const int nv = mesh.num_vertices(), ne = mesh.num_elements();
  out << "# vtk DataFile Version 3.0\nhp mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v)
    out << fmt(mesh.vertex(v).x) << ' ' << fmt(mesh.vertex(v).y) << " 0\n";
  out << "CELLS " << ne << ' ' << 4 * ne << '\n';
  for (int k = 0; k < ne; ++k) {
    const auto& vs = mesh.element(k).vertices;
    out << "3 " << vs[0] << ' ' << vs[1] << ' ' << vs[2] << '\n';
  }
  out << "CELL_TYPES " << ne << '\n';
  for (int k = 0; k < ne; ++k)
    out << "5\n";
  out << "CELL_DATA " << ne << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < ne; ++k)
    out << mesh.element(k).region << '\n';
  out << "SCALARS degree int 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < ne; ++k)
    out << space.degree(k) << '\n';
  for (const auto& [name, values] : cell_fields) {
    if (values.size() != ne)
      throw ArgumentError("write_vtk: field '" + name + "' has the wrong length");
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < ne; ++k)
      out << fmt(values[k]) << '\n';
  }
}

void run_study(const StudyConfig& config, const RunOptions& options, std::vector<StepRecord>& records)
{
  const EigenProblem problem = make_problem(config.problem);
  std::ofstream csv;
  if (!options.csv_path.empty()) {
    csv.open(options.csv_path, std::ios::binary | std::ios::trunc);
    if (!csv)
      throw Error(options.csv_path + ": cannot open for writing");
    csv << csv_header(problem.cluster) << '\n' << std::flush;
  }
  if (!options.vtk_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(options.vtk_dir, ec);
    if (ec)
      throw Error(options.vtk_dir + ": " + ec.message());
  }

  records.clear();
  adapt_loop(problem, config.adapt, records, [&](const StepView& v) {
    if (csv.is_open()) {
      csv << csv_row(v.record, options.timing) << '\n' << std::flush;
      if (!csv)
        throw Error(options.csv_path + ": write failed");
    }
    if (!options.vtk_dir.empty()) {
      std::vector<std::pair<std::string, Eigen::VectorXd>> fields;
      fields.emplace_back("marking", v.indicators.marking);
      for (Eigen::Index i = 0; i < v.indicators.local.cols(); ++i)
        fields.emplace_back("eps2_" + std::to_string(i + 1), v.indicators.local.col(i));
      char name[32];
      std::snprintf(name, sizeof name, "step_%04d.vtk", v.record.step);
      const auto path = std::filesystem::path(options.vtk_dir) / name;
      std::ofstream out(path, std::ios::binary);
      if (!out)
        throw Error(path.string() + ": cannot open for writing");
      write_vtk(out, v.space, fields);
      if (!out)
        throw Error(path.string() + ": write failed");
    }
  });
}

std::vector<StepRecord> run_study(const StudyConfig& config, const RunOptions& options)
{
  std::vector<StepRecord> records;
  run_study(config, options, records);
  return records;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

struct StopOracle {};

OracleLevel oracle_level(const ProblemSpec& spec, const EigenProblem& problem, const StepRecord& rec,
                         const Space& space, const EigenCluster& cluster, const FineSurrogate& fine,
                         const AdaptConfig& adapt)
{
  OracleLevel L;
  L.step = rec.step;
  L.dofs = rec.dofs;
  L.report = defect_report(space, fine, problem.coeffs, cluster.values, cluster.vectors);
  L.sandwich = trace_sandwich(L.report);
  if (const auto exact = exact_spectrum(spec, problem.cluster + 1))
    L.theorem = theorem_checks(L.report, *exact);

  const SparseMatrix Kf = assemble_stiffness(*fine.space, problem.coeffs);
  const SparseMatrix Mf = assemble_mass(*fine.space);
  EigenOptions opt;
  opt.shift = problem.shift;
  opt.tol = adapt.tol;
  opt.max_iter = adapt.max_iter;
  opt.seed = adapt.seed;
  const EigenCluster ref = solve_lowest(Kf, Mf, problem.cluster + problem.skip, opt);
  const Eigen::MatrixXd Q = ref.vectors.rightCols(problem.cluster);
  L.sin_theta = sin_theta_hs(fine.embed(space, cluster.vectors), Q, Mf);
  L.estimate = rec.total_est;
  L.sin_ratio = L.estimate > 0.0 ? L.sin_theta / std::sqrt(L.estimate)
                                 : std::numeric_limits<double>::quiet_NaN();
  L.total_err = rec.total_err;
  return L;
}

} // namespace

std::vector<OracleLevel> oracle_study(const StudyConfig& config)
{
  const EigenProblem problem = make_problem(config.problem);
  const OracleConfig& oc = config.oracle;
  std::vector<OracleLevel> levels;

  if (oc.mode == OracleMode::Uniform) {
    for (int l = 0; l < oc.levels; ++l) {
      Discretization d = problem.initial;
      if (l > 0) {
        auto ref = refine_uniform(*d.mesh, 2 * l);
        std::vector<int> degrees(ref.mesh.num_elements());
        for (int k = 0; k < ref.mesh.num_elements(); ++k)
          degrees[k] = d.degrees[ref.parent[k]];
        d = Discretization{std::make_shared<const Mesh>(std::move(ref.mesh)), std::move(degrees)};
      }
      const StepResult r = solve_and_estimate(problem, d, config.adapt);
      StepRecord rec;
      rec.step = l;
      rec.dofs = r.space->num_dofs();
      rec.total_est = r.indicators.scaled_total;
      if (!problem.reference.empty())
        rec.total_err = relative_error_sum(r.cluster.values, problem.reference);
      const FineSurrogate fine = make_fine(*r.space, oc.fine);
      if (fine.space->num_dofs() > oc.max_fine_dofs)
        break;
      levels.push_back(oracle_level(config.problem, problem, rec, *r.space, r.cluster, fine, config.adapt));
    }
    return levels;
  }

  std::vector<StepRecord> records;
  try {
    adapt_loop(problem, config.adapt, records, [&](const StepView& v) {
      const FineSurrogate fine = make_fine(v.space, oc.fine);
      if (fine.space->num_dofs() > oc.max_fine_dofs)
        throw StopOracle{};
      levels.push_back(oracle_level(config.problem, problem, v.record, v.space, v.cluster, fine,
                                    config.adapt));
    });
  } catch (const StopOracle&) {
  }
  return levels;
}

} // namespace hpeig
