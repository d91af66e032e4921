#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace biot {

/// Compressed sparse row storage with sorted column indices.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplets = std::vector<Eigen::Triplet<double>>;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a factorization meets a (numerically) zero pivot or the
/// solution fails the residual bound.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long row) : std::runtime_error(what), row_(row) {}
  long row() const { return row_; }

 private:
  long row_;
};

SparseMatrix from_triplets(long rows, long cols, const Triplets& entries);

/// y = M x.
Eigen::VectorXd spmv(const SparseMatrix& m, const Eigen::VectorXd& x);
/// y + alpha x.
Eigen::VectorXd add_scaled(const Eigen::VectorXd& y, double alpha, const Eigen::VectorXd& x);
/// B^T u, computed by scattering rows of B.
Eigen::VectorXd transpose_apply(const SparseMatrix& b, const Eigen::VectorXd& u);

/// Exact structural and numerical symmetry up to `tol` times max |entry|.
bool is_symmetric(const SparseMatrix& m, double tol = 0.0);
double inf_norm(const SparseMatrix& m);
double max_abs_entry(const SparseMatrix& m);

/// [[a, b^T], [b, -c]].
SparseMatrix saddle_point_matrix(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c);

/// Direct solver for sparse symmetric (possibly indefinite) matrices.
///
/// The matrix is symmetrically scaled to unit diagonal magnitude and
/// factored as L D L^T with an AMD ordering. If a pivot falls below 1e-13
/// of the largest, the factorization falls back to sparse LU, which handles
/// matrices whose symmetric elimination order breaks down (zero diagonals).
class SymmetricSolver {
 public:
  explicit SymmetricSolver(const SparseMatrix& m);
  ~SymmetricSolver();
  SymmetricSolver(SymmetricSolver&&) noexcept;
  SymmetricSolver& operator=(SymmetricSolver&&) noexcept;

  /// Solves and enforces ||Mx - b|| <= 1e-10 (||M||_inf ||x|| + ||b||).
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }
  bool used_lu() const { return used_lu_; }
  long size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  long n_ = 0;
  bool used_lu_ = false;
  mutable double last_residual_ = 0.0;
};

Eigen::VectorXd solve_symmetric_indefinite(const SparseMatrix& m, const Eigen::VectorXd& rhs);

/// Dense symmetric generalized eigenvalues of (s, l) restricted to the
/// orthogonal complement of the constant vector, ascending.
Eigen::VectorXd eigenvalues_on_complement(const Eigen::MatrixXd& s, const Eigen::MatrixXd& l);

}  // namespace biot
