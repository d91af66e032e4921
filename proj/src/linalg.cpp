#include "biot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace biot {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

SparseMatrix from_triplets(long rows, long cols, const Triplets& entries) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(entries.begin(), entries.end());
  m.makeCompressed();
  return m;
}

Eigen::VectorXd spmv(const SparseMatrix& m, const Eigen::VectorXd& x) {
  if (m.cols() != x.size()) throw ShapeError("spmv: matrix has " + std::to_string(m.cols()) + " columns, vector " + std::to_string(x.size()));
  return m * x;
}

Eigen::VectorXd add_scaled(const Eigen::VectorXd& y, double alpha, const Eigen::VectorXd& x) {
  if (y.size() != x.size()) throw ShapeError("add_scaled: length mismatch");
  return y + alpha * x;
}

Eigen::VectorXd transpose_apply(const SparseMatrix& b, const Eigen::VectorXd& u) {
  if (b.rows() != u.size()) throw ShapeError("transpose_apply: matrix has " + std::to_string(b.rows()) + " rows, vector " + std::to_string(u.size()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(b.cols());
  for (Eigen::Index r = 0; r < b.outerSize(); ++r) {
    const double ur = u[r];
    if (ur == 0.0) continue;
    for (SparseMatrix::InnerIterator it(b, r); it; ++it) out[it.col()] += it.value() * ur;
  }
  return out;
}

double max_abs_entry(const SparseMatrix& m) {
  double mx = 0.0;
  for (Eigen::Index k = 0; k < m.nonZeros(); ++k) mx = std::max(mx, std::abs(m.valuePtr()[k]));
  return mx;
}

double inf_norm(const SparseMatrix& m) {
  double mx = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) s += std::abs(it.value());
    mx = std::max(mx, s);
  }
  return mx;
}

bool is_symmetric(const SparseMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const SparseMatrix t = m.transpose();
  const SparseMatrix diff = m - t;
  const double bound = tol * max_abs_entry(m);
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) {
    if (std::abs(diff.valuePtr()[k]) > bound) return false;
  }
  return true;
}

SparseMatrix saddle_point_matrix(const SparseMatrix& a, const SparseMatrix& b, const SparseMatrix& c) {
  const long nu = a.rows();
  const long np = c.rows();
  if (a.cols() != nu || b.rows() != np || b.cols() != nu || c.cols() != np) {
    throw ShapeError("saddle_point_matrix: incompatible block shapes");
  }
  Triplets t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * b.nonZeros() + c.nonZeros()));
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) t.emplace_back(r, it.col(), it.value());
  }
  for (Eigen::Index r = 0; r < b.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(b, r); it; ++it) {
      t.emplace_back(nu + r, it.col(), it.value());
      t.emplace_back(it.col(), nu + r, it.value());
    }
  }
  for (Eigen::Index r = 0; r < c.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(c, r); it; ++it) t.emplace_back(nu + r, nu + it.col(), -it.value());
  }
  return from_triplets(nu + np, nu + np, t);
}

struct SymmetricSolver::Impl {
  SparseMatrix original;
  Eigen::VectorXd scale;
  Eigen::SimplicialLDLT<ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
  double norm_inf = 0.0;
};

SymmetricSolver::SymmetricSolver(const SparseMatrix& m) : impl_(std::make_unique<Impl>()), n_(m.rows()) {
  if (m.rows() != m.cols()) throw ShapeError("solver needs a square matrix");
  impl_->original = m;
  impl_->norm_inf = inf_norm(m);

  // Symmetric diagonal scaling; rows with a zero diagonal keep unit scale.
  impl_->scale = Eigen::VectorXd::Ones(n_);
  const Eigen::VectorXd diag = m.diagonal();
  for (long i = 0; i < n_; ++i) {
    if (diag[i] != 0.0) impl_->scale[i] = 1.0 / std::sqrt(std::abs(diag[i]));
  }
  ColMatrix scaled = (impl_->scale.asDiagonal() * m * impl_->scale.asDiagonal());
  scaled.makeCompressed();

  impl_->ldlt.compute(scaled);
  bool ok = impl_->ldlt.info() == Eigen::Success;
  long bad_row = -1;
  if (ok) {
    const Eigen::VectorXd d = impl_->ldlt.vectorD();
    const double dmax = n_ > 0 ? d.cwiseAbs().maxCoeff() : 0.0;
    for (long i = 0; i < n_; ++i) {
      if (std::abs(d[i]) < 1e-13 * dmax || !std::isfinite(d[i])) {
        ok = false;
        bad_row = impl_->ldlt.permutationPinv().indices()[i];
        break;
      }
    }
  }
  if (ok) return;

  used_lu_ = true;
  impl_->lu.analyzePattern(scaled);
  impl_->lu.factorize(scaled);
  if (impl_->lu.info() != Eigen::Success) {
    if (bad_row < 0 && n_ > 0) {
      // LDLT stopped without a pivot to blame: report the weakest diagonal.
      Eigen::Index weakest = 0;
      Eigen::VectorXd(scaled.diagonal()).cwiseAbs().minCoeff(&weakest);
      bad_row = static_cast<long>(weakest);
    }
    throw SolverError("singular pivot near row " + std::to_string(bad_row) + ": " + impl_->lu.lastErrorMessage(), bad_row);
  }
}

SymmetricSolver::~SymmetricSolver() = default;
SymmetricSolver::SymmetricSolver(SymmetricSolver&&) noexcept = default;
SymmetricSolver& SymmetricSolver::operator=(SymmetricSolver&&) noexcept = default;

Eigen::VectorXd SymmetricSolver::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw ShapeError("solver: right-hand side has wrong length");
  const Eigen::VectorXd srhs = impl_->scale.cwiseProduct(rhs);
  Eigen::VectorXd y = used_lu_ ? Eigen::VectorXd(impl_->lu.solve(srhs)) : Eigen::VectorXd(impl_->ldlt.solve(srhs));
  Eigen::VectorXd x = impl_->scale.cwiseProduct(y);

  const Eigen::VectorXd r = impl_->original * x - rhs;
  const double bound = impl_->norm_inf * x.norm() + rhs.norm();
  last_residual_ = bound > 0.0 ? r.norm() / bound : r.norm();
  if (!x.allFinite() || r.norm() > 1e-10 * bound) {
    Eigen::Index worst = 0;
    if (r.size() > 0) r.cwiseAbs().maxCoeff(&worst);
    throw SolverError("solution failed residual check at row " + std::to_string(worst), static_cast<long>(worst));
  }
  return x;
}

Eigen::VectorXd solve_symmetric_indefinite(const SparseMatrix& m, const Eigen::VectorXd& rhs) {
  return SymmetricSolver(m).solve(rhs);
}

Eigen::VectorXd eigenvalues_on_complement(const Eigen::MatrixXd& s, const Eigen::MatrixXd& l) {
  const Eigen::Index n = s.rows();
  // Orthonormal basis of 1^perp from a QR of [1 | I].
  Eigen::MatrixXd seed(n, n);
  seed.col(0).setOnes();
  seed.rightCols(n - 1) = Eigen::MatrixXd::Identity(n, n).leftCols(n - 1);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd z = q.rightCols(n - 1);
  const Eigen::MatrixXd sz = z.transpose() * s * z;
  const Eigen::MatrixXd lz = z.transpose() * l * z;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sz + sz.transpose()), 0.5 * (lz + lz.transpose()),
                                                               Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace biot
