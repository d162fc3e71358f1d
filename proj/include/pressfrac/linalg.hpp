/** @file linalg.hpp
 *  @brief Preconditioned conjugate gradients for the SPD Newton systems,
 *         with explicit negative-curvature detection so callers can
 *         regularize indefinite Hessians.
 */
#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <stdexcept>
#include <string>

namespace pressfrac {

/// Thrown when PCG encounters a direction of nonpositive curvature,
/// i.e. the matrix is not positive definite.
class NegativeCurvatureError : public std::runtime_error {
 public:
  explicit NegativeCurvatureError(const std::string& what) : std::runtime_error(what) {}
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

/** Solve A x = b with preconditioned CG.
 *
 *  The preconditioner is an incomplete Cholesky factorization; if the
 *  factorization itself breaks down (indefinite matrix) a Jacobi
 *  preconditioner is used instead so that the curvature check in the CG
 *  loop can still produce a definitive answer.  Convergence is measured
 *  as |b - A x| / |b| <= tol.  Throws NegativeCurvatureError if a
 *  search direction p has p^T A p <= 0, and std::runtime_error if the
 *  iteration limit is exceeded.
 */
inline Eigen::VectorXd sparse_solve(const Eigen::SparseMatrix<double>& A,
                                    const Eigen::VectorXd& b, double tol = 1e-10,
                                    int max_iter = -1, SolveStats* stats = nullptr) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != n)
    throw std::invalid_argument("sparse_solve: dimension mismatch");
  if (max_iter < 0) max_iter = 10 * n + 100;

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Eigen::VectorXd::Zero(n);
  }

  Eigen::IncompleteCholesky<double, Eigen::Lower | Eigen::Upper> ic;
  ic.compute(A);
  const bool use_ic = (ic.info() == Eigen::Success);
  Eigen::VectorXd inv_diag;
  if (!use_ic) {
    inv_diag.resize(n);
    for (int i = 0; i < n; ++i) {
      const double di = A.coeff(i, i);
      inv_diag[i] = (di > 0.0) ? 1.0 / di : 1.0;
    }
  }
  auto precond = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return use_ic ? ic.solve(r).eval() : (inv_diag.array() * r.array()).matrix().eval();
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = precond(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd Ap = A * p;
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0)
      throw NegativeCurvatureError("sparse_solve: nonpositive curvature (p^T A p = " +
                                   std::to_string(pAp) + "), matrix is not SPD");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rel = r.norm() / bnorm;
    if (rel <= tol) {
      if (stats) *stats = {it + 1, rel};
      return x;
    }
    z = precond(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw std::runtime_error("sparse_solve: CG failed to converge within " +
                           std::to_string(max_iter) + " iterations");
}

}  // namespace pressfrac
