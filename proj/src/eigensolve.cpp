#include "hpeig/eigensolve.hpp"

#include "hpeig/error.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <random>

namespace hpeig {

namespace {

/// Flip each column so that its entry of largest magnitude is positive.
void normalize_signs(Eigen::MatrixXd& X)
{
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::Index i = 0;
    X.col(j).cwiseAbs().maxCoeff(&i);
    if (X(i, j) < 0.0)
      X.col(j) *= -1.0;
  }
}

/// M-orthonormal basis of span(Y) via the eigendecomposition of the Gram matrix.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& Y, const SparseMatrix& M)
{
  Eigen::MatrixXd G = Y.transpose() * (M * Y);
  G = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd& d = es.eigenvalues();
  const double cutoff = d.maxCoeff() * 1e-13;
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    keep += d[i] > cutoff ? 1 : 0;
  const Eigen::Index skip = d.size() - keep;
  Eigen::MatrixXd X = Y * es.eigenvectors().rightCols(keep);
  for (Eigen::Index j = 0; j < keep; ++j)
    X.col(j) /= std::sqrt(d[skip + j]);
  return X;
}

} // namespace

EigenCluster solve_dense(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, int m)
{
  const Eigen::Index n = B.rows();
  if (m < 1 || m > n)
    throw ArgumentError("solve_dense: requested count out of range");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, M);
  if (es.info() != Eigen::Success)
    throw SolverError("solve_dense: mass matrix is not positive definite");
  EigenCluster c;
  c.values = es.eigenvalues().head(m);
  c.vectors = es.eigenvectors().leftCols(m);
  normalize_signs(c.vectors);
  c.residuals.resize(m);
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd bx = B * c.vectors.col(i);
    const Eigen::VectorXd r = bx - c.values[i] * (M * c.vectors.col(i));
    const double scale = bx.norm();
    c.residuals[i] = scale > 0.0 ? r.norm() / scale : r.norm();
  }
  return c;
}

EigenCluster solve_lowest(const SparseMatrix& B, const SparseMatrix& M, int m,
                          const EigenOptions& options)
{
  const Eigen::Index n = B.rows();
  if (B.cols() != n || M.rows() != n || M.cols() != n)
    throw ArgumentError("solve_lowest: matrix dimensions disagree");
  if (m < 1 || m > n)
    throw ArgumentError("solve_lowest: requested count out of range");

  const int block = static_cast<int>(std::min<Eigen::Index>(m + options.guard, n));
  if (block >= n) {
    auto c = solve_dense(Eigen::MatrixXd(B), Eigen::MatrixXd(M), m);
    return c;
  }

  const SparseMatrix K = B - options.shift * M;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("solve_lowest: factorization of the shifted pencil failed");
  const Eigen::VectorXd& D = ldlt.vectorD();
  if ((D.array() <= 1e-14 * D.cwiseAbs().maxCoeff()).any())
    throw SolverError("solve_lowest: shifted pencil is not positive definite");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd X(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      X(i, j) = uni(rng);
  if (options.start) {
    const Eigen::MatrixXd& S = *options.start;
    if (S.rows() != n)
      throw ArgumentError("solve_lowest: start vectors have the wrong length");
    const Eigen::Index k = std::min<Eigen::Index>(S.cols(), block);
    X.leftCols(k) = S.leftCols(k);
  }
  X = m_orthonormalize(X, M);

  EigenCluster c;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::MatrixXd Y = ldlt.solve(M * X);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("solve_lowest: back substitution failed");
    X = m_orthonormalize(Y, M);
    if (X.cols() < m)
      throw SolverError("solve_lowest: iteration space collapsed");

    // Rayleigh–Ritz in the M-orthonormal basis.
    const Eigen::MatrixXd KX = K * X;
    Eigen::MatrixXd H = X.transpose() * KX;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    X = X * es.eigenvectors();
    const Eigen::MatrixXd KXr = KX * es.eigenvectors();
    const Eigen::MatrixXd MX = M * X.leftCols(m);

    c.values.resize(m);
    c.residuals.resize(m);
    for (int i = 0; i < m; ++i) {
      const double theta = es.eigenvalues()[i];
      c.values[i] = theta + options.shift;
      const double scale = KXr.col(i).norm();
      const double r = (KXr.col(i) - theta * MX.col(i)).norm();
      c.residuals[i] = scale > 0.0 ? r / scale : r;
    }
    c.iterations = it;
    if (c.residuals.maxCoeff() <= options.tol)
      break;

    // Accept a roundoff floor once the residual has stopped improving.
    const double res = c.residuals.maxCoeff();
    if (res < 0.5 * best) {
      best = res;
      stalled = 0;
    } else if (++stalled >= 10 && res <= 1e3 * options.tol) {
      break;
    }
    if (it == options.max_iter)
      throw SolverError("solve_lowest: no convergence within the iteration budget");
  }
  c.vectors = X.leftCols(m);
  normalize_signs(c.vectors);
  return c;
}

} // namespace hpeig
