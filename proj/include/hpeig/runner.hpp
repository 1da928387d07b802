#pragma once

#include "hpeig/adaptivity.hpp"
#include "hpeig/defect.hpp"
#include "hpeig/reference.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hpeig {

// ---------------------------------------------------------------------------
// Problems

struct ProblemSpec {
  std::string name;
  Geometry geometry = Geometry::UnitSquare;
  GeometryOptions mesh;
  Coefficients coeffs;
  int degree = 2;
  int cluster = 4;
  int skip = 0;
  double shift = 0.0;
  std::string reference_key;  ///< registry key, empty when no references are known
  double reference_param = 0.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ProblemInfo {
  std::string key;
  std::string description;
};

std::vector<ProblemInfo> registry_problems();

/// Registry problem by key. Also accepts the families "reaction" (κ = 10) and
/// "diffusion" (a = 10). Throws ConfigError for unknown keys.
ProblemSpec problem_spec(std::string_view key);

/// −Δu + κχ₁u on the touching squares, Neumann everywhere.
ProblemSpec reaction_problem(double kappa);
/// −∇·(a χ₁ + χ₂)∇u on the touching squares, Dirichlet everywhere.
ProblemSpec diffusion_problem(double a);

/// Reference eigenvalues of the cluster (after skipped modes), empty when unknown.
std::vector<double> cluster_reference(const ProblemSpec& spec);

/// λ_1..λ_count following the cluster when the spectrum is known exactly; nullopt otherwise.
std::optional<std::vector<double>> exact_spectrum(const ProblemSpec& spec, int count);

EigenProblem make_problem(const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Configuration

enum class OracleMode { Adaptive, Uniform };

struct OracleConfig {
  OracleMode mode = OracleMode::Adaptive;
  int levels = 3;             ///< uniform mode: number of levels, two bisection sweeps apart
  FineSpec fine;
  int max_fine_dofs = 60000;  ///< adaptive mode stops once the surrogate would be larger
};

struct StudyConfig {
  ProblemSpec problem;
  AdaptConfig adapt;
  OracleConfig oracle;
};

/// Parse the sectioned key = value format. Errors carry "origin:line: ".
StudyConfig parse_config(std::string_view text, const std::string& origin = "<config>");
StudyConfig load_config(const std::string& path);

// ---------------------------------------------------------------------------
// Output

std::string csv_header(int m);
/// One CSV line (no newline); seconds is written as 0 when timing is off.
std::string csv_row(const StepRecord& rec, bool timing = true);

/// Legacy ASCII unstructured grid: triangles, region and degree as CELL_DATA,
/// plus one cell field per (name, values) pair.
void write_vtk(std::ostream& out, const Space& space,
               const std::vector<std::pair<std::string, Eigen::VectorXd>>& cell_fields = {});

struct RunOptions {
  std::string csv_path;   ///< empty: no CSV
  std::string vtk_dir;    ///< empty: no VTK
  bool timing = true;
};

/// Adaptive study. Rows are flushed as steps complete, so a SolverError leaves
/// the partial CSV on disk (and in `records`) before it propagates. Throws Error
/// on I/O failure.
void run_study(const StudyConfig& config, const RunOptions& options, std::vector<StepRecord>& records);
std::vector<StepRecord> run_study(const StudyConfig& config, const RunOptions& options);

// ---------------------------------------------------------------------------
// Defect oracle along a study

struct OracleLevel {
  int step = 0;
  int dofs = 0;
  DefectReport report;
  SandwichSlack sandwich;
  std::optional<TheoremCheck> theorem;  ///< only with an exactly known spectrum
  double sin_theta = 0.0;               ///< against the lowest eigenspace of the surrogate
  double estimate = 0.0;                ///< Σ λ̂_i⁻¹ ε_i²
  double sin_ratio = 0.0;               ///< sin_theta / sqrt(estimate)
  double total_err = 0.0;               ///< NaN without references
};

std::vector<OracleLevel> oracle_study(const StudyConfig& config);

} // namespace hpeig
