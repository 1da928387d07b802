#pragma once

#include "hpeig/assembly.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace hpeig {

/// Residual indicators for a cluster of discrete eigenpairs.
struct Indicators {
  Eigen::MatrixXd local;    ///< elements x m: ε_i²(K)
  Eigen::VectorXd totals;   ///< ε_i² = Σ_K ε_i²(K)
  Eigen::VectorXd marking;  ///< per element Σ_i λ̂_i⁻¹ ε_i²(K)
  double scaled_total = 0.0;  ///< Σ_i λ̂_i⁻¹ ε_i²
};

/// ‖μφ − cφ + ∇·A∇φ‖² on element k.
double element_residual_norm2(const Space& space, const Coefficients& coeffs, int k,
                              const Eigen::VectorXd& phi, double mu);

/// ‖r‖² on edge e: the flux jump on interior edges, the single-sided flux on
/// Neumann edges, zero on Dirichlet edges.
double edge_jump_norm2(const Space& space, const Coefficients& coeffs, int e,
                       const Eigen::VectorXd& phi);

struct EdgeTerm {
  double h = 0.0;     ///< edge length
  int p = 1;          ///< max degree of the adjacent elements
  double r2 = 0.0;    ///< ‖r‖² on the edge
  double weight = 1;  ///< 1/2 for interior edges, 1 for Neumann edges
};

/// (h_K/p_K)² ‖R‖² + Σ weight·(h_e/p_e)‖r‖².
double local_indicator(double h, int p, double residual2, std::span<const EdgeTerm> edges);

/// Indicators for every element and cluster member (columns of `vectors`).
Indicators estimate(const Space& space, const Coefficients& coeffs, const Eigen::VectorXd& values,
                    const Eigen::MatrixXd& vectors);

/// Order-independent compensated sum: sort, then Kahan.
double compensated_sum(std::vector<double> terms);

/// Σ_i (λ̂_i − λ_i)/λ̂_i.
double relative_error_sum(const Eigen::VectorXd& computed, std::span<const double> exact);

/// Σ_i (λ̂_i − λ_i)/λ̂_i divided by Σ_i λ̂_i⁻¹ε_i². Throws ArgumentError without references.
double effectivity(const Eigen::VectorXd& computed, std::span<const double> exact,
                   double scaled_estimate);

} // namespace hpeig
