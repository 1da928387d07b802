#pragma once

#include "hpeig/assembly.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <vector>

namespace hpeig {

/// Reference space used as a surrogate for the continuous solution operator:
/// `sweeps` uniform bisection sweeps and every degree raised by `extra_degree`.
struct FineSpec {
  int sweeps = 1;
  int extra_degree = 2;
};

struct FineSurrogate {
  std::unique_ptr<Space> space;
  std::vector<int> parent;  ///< fine element -> coarse element

  /// Embed coarse coefficient vectors (columns) into the fine space.
  [[nodiscard]] Eigen::MatrixXd embed(const Space& coarse, const Eigen::MatrixXd& x) const;
};

FineSurrogate make_fine(const Space& coarse, const FineSpec& spec = {});

/// Solutions u of B(u, v) = (f, v) for all v in `space`, one per column of f
/// (coefficients in the same space). Throws SolverError if B is singular.
Eigen::MatrixXd solve_source(const Space& space, const Coefficients& coeffs, const Eigen::MatrixXd& f);

/// Generalized eigenvalues of (E, G), ascending. Throws SolverError if G is not
/// positive definite.
Eigen::VectorXd defects(const Eigen::MatrixXd& E, const Eigen::MatrixXd& G);

struct DefectReport {
  Eigen::VectorXd mu;       ///< Ritz values μ̂_i
  Eigen::VectorXd eta2;     ///< η_i², ascending
  Eigen::MatrixXd E;        ///< error matrix
  Eigen::MatrixXd G;        ///< gradient matrix
  Eigen::VectorXd d_mu;     ///< diagonal of D_μ = diag(1/μ̂_i)
  double frak_D = 0.0;      ///< ‖D_μ^{-1/2}(G − D_μ)D_μ^{-1/2}‖₂
  Eigen::VectorXd source_errors;  ///< |||u(μ̂_iφ̂_i) − û(μ̂_iφ̂_i)|||²
  double identity_defect = 0.0;   ///< max_i ‖μ̂_i û(φ̂_i) − φ̂_i‖_M
  int coarse_dofs = 0;
  int fine_dofs = 0;
};

/// Defect report for the Ritz pairs (mu, phi) of `coarse`, with u(f) replaced by
/// its Galerkin approximation in the fine surrogate.
DefectReport defect_report(const Space& coarse, const Coefficients& coeffs, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& phi, const FineSpec& spec = {});

/// Same, reusing an existing surrogate.
DefectReport defect_report(const Space& coarse, const FineSurrogate& fine, const Coefficients& coeffs,
                           const Eigen::VectorXd& mu, const Eigen::MatrixXd& phi);

struct SandwichSlack {
  double lower = 0.0;  ///< Σ η_i² − (1+𝔇_l)⁻¹ Σ μ̂_i⁻¹ |||u − û|||²
  double upper = 0.0;  ///< Σ μ̂_i⁻¹ |||u − û|||² − Σ η_i²
  [[nodiscard]] bool holds(double tol = 1e-10) const { return lower >= -tol && upper >= -tol; }
};

SandwichSlack trace_sandwich(const DefectReport& report);

/// ‖sin Θ‖ in the Hilbert–Schmidt norm between span(X) and span(Q), both
/// M-orthonormal. Throws ArgumentError if either basis is rank deficient.
double sin_theta_hs(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, const SparseMatrix& M);

struct TheoremCheck {
  bool hypothesis = false;     ///< η_M/(1−η_M) < (λ_{M+1} − λ̂_M)/(λ_{M+1} + λ̂_M)
  double hypothesis_lhs = 0.0;
  double hypothesis_rhs = 0.0;
  double eta2_sum = 0.0;
  double rel_error_sum = 0.0;   ///< Σ (λ̂_i − λ_i)/λ̂_i
  double lower_bound = 0.0;     ///< λ̂₁/(2λ̂_M) Σ η_i²
  bool lower_bound_holds = false;
  bool ratio_defined = false;   ///< false when the cluster is resolved to roundoff
  double ratio = 0.0;           ///< Σ η_i² / Σ (λ̂_i − λ_i)/λ̂_i
};

/// `exact` holds λ_1..λ_{M+1}.
TheoremCheck theorem_checks(const DefectReport& report, std::span<const double> exact);

} // namespace hpeig
