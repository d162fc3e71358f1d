#include <catch2/catch_amalgamated.hpp>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "helpers.hpp"
#include "pressfrac/linalg.hpp"

using namespace pressfrac;

namespace {

// 5-point Laplacian on an n x n grid with homogeneous Dirichlet boundary.
Eigen::SparseMatrix<double> laplacian2d(int n) {
  const int N = n * n;
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = i * n + j;
      trips.emplace_back(k, k, 4.0);
      if (i > 0) trips.emplace_back(k, k - n, -1.0);
      if (i < n - 1) trips.emplace_back(k, k + n, -1.0);
      if (j > 0) trips.emplace_back(k, k - 1, -1.0);
      if (j < n - 1) trips.emplace_back(k, k + 1, -1.0);
    }
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

}  // namespace

TEST_CASE("sparse_solve matches a dense factorization") {
  const Eigen::SparseMatrix<double> A = laplacian2d(10);
  const Eigen::VectorXd b = testutil::random_vector(A.rows(), 1.0);
  const Eigen::VectorXd x_ref = Eigen::MatrixXd(A).ldlt().solve(b);
  SolveStats stats;
  const Eigen::VectorXd x = sparse_solve(A, b, 1e-12, -1, &stats);
  CHECK((x - x_ref).norm() < 1e-9 * x_ref.norm());
  CHECK(stats.iterations > 0);
}

TEST_CASE("negative curvature is reported") {
  Eigen::SparseMatrix<double> A(2, 2);
  A.insert(0, 0) = 1.0;
  A.insert(1, 1) = -1.0;
  A.makeCompressed();
  Eigen::VectorXd b(2);
  b << 0.0, 1.0;
  CHECK_THROWS_AS(sparse_solve(A, b), NegativeCurvatureError);
}

TEST_CASE("dimension mismatch is rejected") {
  const Eigen::SparseMatrix<double> A = laplacian2d(3);
  CHECK_THROWS_AS(sparse_solve(A, Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("zero right-hand side returns zero immediately") {
  const Eigen::SparseMatrix<double> A = laplacian2d(4);
  const Eigen::VectorXd x = sparse_solve(A, Eigen::VectorXd::Zero(16));
  CHECK(x.norm() == 0.0);
}
