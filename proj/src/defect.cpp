#include "hpeig/defect.hpp"

#include "hpeig/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpeig {

namespace {

class Factor {
public:
  explicit Factor(const SparseMatrix& K)
  {
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success)
      throw SolverError("source problem: factorization failed");
    const Eigen::VectorXd d = ldlt_.vectorD();
    if (d.size() > 0 && d.minCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff())
      throw SolverError("source problem: bilinear form is not positive definite on this space");
  }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const { return ldlt_.solve(rhs); }

private:
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& A)
{
  return 0.5 * (A + A.transpose());
}

} // namespace

Eigen::MatrixXd FineSurrogate::embed(const Space& coarse, const Eigen::MatrixXd& x) const
{
  Eigen::MatrixXd out(space->num_dofs(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    out.col(j) = prolong(coarse, x.col(j), *space, parent);
  return out;
}

FineSurrogate make_fine(const Space& coarse, const FineSpec& spec)
{
  if (spec.sweeps < 0 || spec.extra_degree < 0)
    throw ArgumentError("fine surrogate: sweeps and extra degree must be nonnegative");
  auto ref = refine_uniform(coarse.mesh(), spec.sweeps);
  std::vector<int> degrees(ref.mesh.num_elements());
  for (int k = 0; k < ref.mesh.num_elements(); ++k)
    degrees[k] = coarse.degree(ref.parent[k]) + spec.extra_degree;
  FineSurrogate f;
  f.parent = std::move(ref.parent);
  f.space = std::make_unique<Space>(std::make_shared<const Mesh>(std::move(ref.mesh)), std::move(degrees));
  return f;
}

Eigen::MatrixXd solve_source(const Space& space, const Coefficients& coeffs, const Eigen::MatrixXd& f)
{
  const SparseMatrix K = assemble_stiffness(space, coeffs);
  const SparseMatrix M = assemble_mass(space);
  return Factor(K).solve(M * f);
}

Eigen::VectorXd defects(const Eigen::MatrixXd& E, const Eigen::MatrixXd& G)
{
  if (E.rows() != E.cols() || G.rows() != G.cols() || E.rows() != G.rows())
    throw ArgumentError("defects: E and G must be square and of equal size");
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw SolverError("defects: G is not positive definite (reference space too coarse?)");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(E, G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw SolverError("defects: generalized eigensolver failed");
  return es.eigenvalues();
}

DefectReport defect_report(const Space& coarse, const Coefficients& coeffs, const Eigen::VectorXd& mu,
                           const Eigen::MatrixXd& phi, const FineSpec& spec)
{
  return defect_report(coarse, make_fine(coarse, spec), coeffs, mu, phi);
}

DefectReport defect_report(const Space& coarse, const FineSurrogate& fine, const Coefficients& coeffs,
                           const Eigen::VectorXd& mu, const Eigen::MatrixXd& phi)
{
  const Eigen::Index m = mu.size();
  if (phi.cols() != m || phi.rows() != coarse.num_dofs())
    throw ArgumentError("defect_report: basis has the wrong shape");
  if (m == 0 || mu.minCoeff() <= 0.0)
    throw ArgumentError("defect_report: Ritz values must be positive");

  DefectReport r;
  r.mu = mu;
  r.coarse_dofs = coarse.num_dofs();
  r.fine_dofs = fine.space->num_dofs();

  // coarse solution operator û
  const SparseMatrix Kc = assemble_stiffness(coarse, coeffs);
  const SparseMatrix Mc = assemble_mass(coarse);
  const Eigen::MatrixXd uhat = Factor(Kc).solve(Mc * phi);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::VectorXd d = mu[i] * uhat.col(i) - phi.col(i);
    r.identity_defect = std::max(r.identity_defect, std::sqrt(std::max(0.0, d.dot(Mc * d))));
  }

  // surrogate for u
  const SparseMatrix Kf = assemble_stiffness(*fine.space, coeffs);
  const SparseMatrix Mf = assemble_mass(*fine.space);
  const Eigen::MatrixXd u = Factor(Kf).solve(Mf * fine.embed(coarse, phi));
  const Eigen::MatrixXd e = u - fine.embed(coarse, uhat);

  r.E = symmetric_part(e.transpose() * (Kf * e));
  r.G = symmetric_part(u.transpose() * (Kf * u));
  r.d_mu = mu.cwiseInverse();
  const Eigen::VectorXd s = mu.cwiseSqrt();
  const Eigen::MatrixXd S =
      s.asDiagonal() * (r.G - Eigen::MatrixXd(r.d_mu.asDiagonal())) * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  r.frak_D = es.eigenvalues().cwiseAbs().maxCoeff();
  r.eta2 = defects(r.E, r.G);
  r.source_errors.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    r.source_errors[i] = mu[i] * mu[i] * r.E(i, i);
  return r;
}

SandwichSlack trace_sandwich(const DefectReport& report)
{
  double bound = 0.0;
  for (Eigen::Index i = 0; i < report.mu.size(); ++i)
    bound += report.source_errors[i] / report.mu[i];
  const double eta = report.eta2.sum();
  return {eta - bound / (1.0 + report.frak_D), bound - eta};
}

double sin_theta_hs(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Q, const SparseMatrix& M)
{
  if (X.rows() != M.rows() || Q.rows() != M.rows())
    throw ArgumentError("sin_theta_hs: bases and mass matrix disagree in size");
  for (const Eigen::MatrixXd* B : {&X, &Q}) {
    if (B->cols() == 0)
      throw ArgumentError("sin_theta_hs: empty basis");
    const Eigen::MatrixXd g = B->transpose() * (M * *B);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric_part(g), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] <= 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff())
      throw ArgumentError("sin_theta_hs: rank-deficient basis");
  }
  // residual of the M-orthogonal projection of X onto span(Q)
  const Eigen::MatrixXd R = X - Q * (Q.transpose() * (M * X));
  const double s2 = (R.transpose() * (M * R)).trace();
  return std::sqrt(std::max(0.0, s2));
}

TheoremCheck theorem_checks(const DefectReport& report, std::span<const double> exact)
{
  const Eigen::Index m = report.mu.size();
  if (static_cast<Eigen::Index>(exact.size()) < m + 1)
    throw ArgumentError("theorem_checks: need the exact eigenvalues lambda_1..lambda_{M+1}");
  TheoremCheck t;
  const double eta_M = std::sqrt(std::max(0.0, report.eta2[m - 1]));
  const double lam_next = exact[m], mu_M = report.mu[m - 1];
  t.hypothesis_lhs = eta_M < 1.0 ? eta_M / (1.0 - eta_M) : std::numeric_limits<double>::infinity();
  t.hypothesis_rhs = (lam_next - mu_M) / (lam_next + mu_M);
  t.hypothesis = t.hypothesis_lhs < t.hypothesis_rhs;

  t.eta2_sum = report.eta2.sum();
  for (Eigen::Index i = 0; i < m; ++i)
    t.rel_error_sum += (report.mu[i] - exact[i]) / report.mu[i];
  t.lower_bound = report.mu[0] / (2.0 * mu_M) * t.eta2_sum;
  // Ritz values carry roundoff of a few ulps
  const double noise = 1e-14 * static_cast<double>(m);
  t.lower_bound_holds = t.rel_error_sum + noise >= t.lower_bound;
  // below this the eigenvalue errors are dominated by roundoff
  t.ratio_defined = t.rel_error_sum >= 1e-12 && t.eta2_sum > 0.0;
  t.ratio = t.ratio_defined ? t.eta2_sum / t.rel_error_sum : std::numeric_limits<double>::quiet_NaN();
  return t;
}

} // namespace hpeig
