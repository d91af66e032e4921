#include <gtest/gtest.h>

#include <random>

#include "biot/linalg.hpp"

using namespace biot;

namespace {

SparseMatrix random_spd(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Triplets t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0 + u(rng));
    if (i + 1 < n) {
      const double v = u(rng);
      t.emplace_back(i, i + 1, v);
      t.emplace_back(i + 1, i, v);
    }
  }
  return from_triplets(n, n, t);
}

SparseMatrix random_rect(int rows, int cols, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Triplets t;
  for (int i = 0; i < rows; ++i) {
    t.emplace_back(i, i % cols, 1.0 + std::abs(u(rng)));
    t.emplace_back(i, (3 * i + 1) % cols, u(rng));
  }
  return from_triplets(rows, cols, t);
}

}  // namespace

TEST(Linalg, SpmvAndTransposeApply) {
  std::mt19937 rng(1);
  const SparseMatrix b = random_rect(5, 8, rng);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(b);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(8);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(5);
  EXPECT_LT((spmv(b, x) - dense * x).norm(), 1e-14);
  EXPECT_LT((transpose_apply(b, y) - dense.transpose() * y).norm(), 1e-14);
  EXPECT_LT((add_scaled(y, 2.0, y) - 3.0 * y).norm(), 1e-15);
  EXPECT_THROW(spmv(b, y), ShapeError);
}

TEST(Linalg, NormsAndSymmetry) {
  const SparseMatrix m = from_triplets(2, 2, {{0, 0, 1.0}, {0, 1, -3.0}, {1, 0, -3.0}, {1, 1, 2.0}});
  EXPECT_DOUBLE_EQ(inf_norm(m), 5.0);
  EXPECT_DOUBLE_EQ(max_abs_entry(m), 3.0);
  EXPECT_TRUE(is_symmetric(m));
  const SparseMatrix n = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0 + 1e-9}});
  EXPECT_FALSE(is_symmetric(n));
  EXPECT_TRUE(is_symmetric(n, 1e-8));
}

TEST(Linalg, SaddlePointLayout) {
  std::mt19937 rng(2);
  const SparseMatrix a = random_spd(6, rng);
  const SparseMatrix b = random_rect(3, 6, rng);
  const SparseMatrix c = random_spd(3, rng);
  const Eigen::MatrixXd k = Eigen::MatrixXd(saddle_point_matrix(a, b, c));
  EXPECT_LT((k.topLeftCorner(6, 6) - Eigen::MatrixXd(a)).norm(), 1e-15);
  EXPECT_LT((k.topRightCorner(6, 3) - Eigen::MatrixXd(b).transpose()).norm(), 1e-15);
  EXPECT_LT((k.bottomRightCorner(3, 3) + Eigen::MatrixXd(c)).norm(), 1e-15);
  EXPECT_THROW(saddle_point_matrix(a, random_rect(3, 5, rng), c), ShapeError);
}

TEST(SymmetricSolver, ResidualBoundOnRandomSaddleSystems) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 20 + trial, m = 5 + trial / 3;
    const SparseMatrix k = saddle_point_matrix(random_spd(n, rng), random_rect(m, n, rng), random_spd(m, rng));
    const Eigen::VectorXd rhs = Eigen::VectorXd::Random(n + m);
    const SymmetricSolver s(k);
    const Eigen::VectorXd x = s.solve(rhs);
    const double bound = 1e-10 * (inf_norm(k) * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>());
    EXPECT_LE((k * x - rhs).lpNorm<Eigen::Infinity>(), bound);
    EXPECT_LE(s.last_residual(), 1e-10);
  }
}

TEST(SymmetricSolver, ZeroDiagonalFallsBackToLu) {
  // [[0, 1], [1, 0]] has no valid symmetric pivot in natural order.
  const SparseMatrix k = from_triplets(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
  const SymmetricSolver s(k);
  const Eigen::VectorXd x = s.solve(Eigen::Vector2d(2.0, 3.0));
  EXPECT_NEAR(x[0], 3.0, 1e-14);
  EXPECT_NEAR(x[1], 2.0, 1e-14);
}

TEST(SymmetricSolver, SingularMatrixReportsRow) {
  const SparseMatrix k = from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {0, 1, 0.5}, {1, 0, 0.5}});
  try {
    const SymmetricSolver s(k);
    s.solve(Eigen::Vector3d(1.0, 1.0, 1.0));
    FAIL() << "singular matrix accepted";
  } catch (const SolverError& e) {
    EXPECT_GE(e.row(), 0);
  }
}

TEST(SymmetricSolver, RejectsNonSquare) {
  std::mt19937 rng(4);
  EXPECT_THROW(SymmetricSolver(random_rect(3, 4, rng)), ShapeError);
}

TEST(Eigenvalues, ComplementOfConstants) {
  // s = 2 l with l the path Laplacian: every eigenvalue on 1-perp is 2.
  const Eigen::MatrixXd l = (Eigen::MatrixXd(3, 3) << 1, -1, 0, -1, 2, -1, 0, -1, 1).finished();
  const Eigen::VectorXd ev = eigenvalues_on_complement(2.0 * l, l);
  ASSERT_EQ(ev.size(), 2);
  EXPECT_NEAR(ev[0], 2.0, 1e-12);
  EXPECT_NEAR(ev[1], 2.0, 1e-12);
}
