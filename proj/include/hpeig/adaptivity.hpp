#pragma once

#include "hpeig/eigensolve.hpp"
#include "hpeig/estimator.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hpeig {

// ---------------------------------------------------------------------------
// Local analyticity

/// L2-orthonormal (Dubiner) basis on the reference triangle, ordered by total
/// degree q and, within a degree, by the first index i = q..0.
/// Rows: points, columns: basis functions of total degree <= p.
Eigen::MatrixXd dubiner_table(int p, std::span<const double> xs, std::span<const double> ys);

/// a_q = sqrt(Σ_{i+j=q} c_ij²) for the expansion of φ|_K in the orthonormal basis, q = 0..p(K).
std::vector<double> decay_coefficients(const Space& space, const Eigen::VectorXd& phi, int k);

/// Least-squares slope σ of log a_q ≈ c − σ q over q = first..a.size()-1.
/// Returns +infinity when every a_q in that window is negligible relative to max a_q.
double fit_decay(std::span<const double> a, int first = 0);

/// σ for element k: the fit window skips q = 0 when p(K) >= 3.
double analyticity(const Space& space, const Eigen::VectorXd& phi, int k);

// ---------------------------------------------------------------------------
// Marking and refinement

enum class Strategy { HP, H, Uniform };

Strategy strategy_from_name(std::string_view name);
std::string_view to_string(Strategy s);

struct AdaptConfig {
  double theta = 0.3;
  double sigma0 = 1.0;
  int p_max = 10;
  int dof_budget = 30000;
  int max_steps = 200;
  Strategy strategy = Strategy::HP;
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

enum class Action { HRefine, PIncrement };

struct MarkingDecision {
  std::vector<int> marked;
  std::vector<Action> actions;
};

/// The ceil(θ|T|) elements with the largest indicators; ties go to the lower id.
std::vector<int> mark_fixed_fraction(std::span<const double> indicators, double theta);

Action decide(double sigma, double sigma0, int degree, int p_max);

/// Current discretization: mesh plus per-element degrees.
struct Discretization {
  std::shared_ptr<const Mesh> mesh;
  std::vector<int> degrees;
};

/// Raise degrees until vertex-adjacent elements differ by at most one.
void smooth_degrees(const Mesh& mesh, std::vector<int>& degrees);

/// Apply a decision: degree increments first, then bisection of the h-marked
/// elements (children inherit degrees), then degree smoothing.
Discretization apply_decision(const Discretization& d, const MarkingDecision& decision, int p_max);

// ---------------------------------------------------------------------------
// Adaptive loop

/// A benchmark eigenproblem ready to discretize.
struct EigenProblem {
  std::string name;
  Discretization initial;
  Coefficients coeffs;
  int cluster = 4;
  int skip = 0;          ///< lowest modes solved for but dropped (the constant of pure Neumann)
  double shift = 0.0;    ///< σ for the shift-invert solver
  std::vector<double> reference;  ///< reference eigenvalues, empty when unknown
};

struct StepRecord {
  int step = 0;
  int dofs = 0;
  int elements = 0;
  int max_degree = 0;
  double gamma_degree = 1.0;
  Eigen::VectorXd lambda;
  Eigen::VectorXd relerr;  ///< NaN without references
  Eigen::VectorXd eps2;
  double total_est = 0.0;
  double total_err = std::numeric_limits<double>::quiet_NaN();
  double effectivity = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;    ///< wall time since the start of the run
};

/// Everything computed at one step, handed to observers (e.g. VTK output).
struct StepView {
  const StepRecord& record;
  const Space& space;
  const EigenCluster& cluster;
  const Indicators& indicators;
};

using StepObserver = std::function<void(const StepView&)>;

/// Solve and estimate on one discretization.
struct StepResult {
  std::unique_ptr<Space> space;
  EigenCluster cluster;
  Indicators indicators;
};
StepResult solve_and_estimate(const EigenProblem& problem, const Discretization& d,
                              const AdaptConfig& config);

/// Decide per marked element between bisection and a degree increment.
MarkingDecision make_decision(const StepResult& step, const AdaptConfig& config);

/// solve → estimate → mark → refine until the dof budget is reached. Records are
/// appended to `records` as they are produced, so a solver failure leaves the
/// completed steps in place before the exception propagates.
void adapt_loop(const EigenProblem& problem, const AdaptConfig& config,
                std::vector<StepRecord>& records, const StepObserver& observer = {});

} // namespace hpeig
