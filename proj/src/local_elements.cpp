#include "biot/local_elements.hpp"

#include <cmath>
#include <string>

namespace biot {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void require_mu(double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("shear modulus mu must be positive, got " + std::to_string(mu));
}

}  // namespace

SimplexGeometry simplex_geometry(std::span<const std::array<double, 2>> vertices, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("simplex dimension must be 1 or 2");
  if (vertices.size() != static_cast<std::size_t>(dim + 1)) {
    throw std::invalid_argument("simplex of dimension " + std::to_string(dim) + " needs " + std::to_string(dim + 1) + " vertices");
  }

  // Jacobian of the affine map from the reference simplex, columns p_k - p_0.
  Eigen::MatrixXd jac(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int r = 0; r < dim; ++r) jac(r, k) = vertices[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(r)] - vertices[0][static_cast<std::size_t>(r)];
  }

  double diameter = 0.0;
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      double d2 = 0.0;
      for (int r = 0; r < dim; ++r) {
        const double dx = vertices[b][static_cast<std::size_t>(r)] - vertices[a][static_cast<std::size_t>(r)];
        d2 += dx * dx;
      }
      diameter = std::max(diameter, std::sqrt(d2));
    }
  }

  const double det = jac.determinant();
  const double measure = std::abs(det) / factorial(dim);
  if (!(measure > 1e-14 * std::pow(diameter, dim))) {
    throw DegenerateSimplexError("degenerate simplex (measure " + std::to_string(measure) + ")");
  }

  // Rows of J^{-1} are the gradients of lambda_1..lambda_d.
  const Eigen::MatrixXd jinv = jac.inverse();
  Eigen::MatrixXd grads(dim, dim + 1);
  for (int k = 0; k < dim; ++k) grads.col(k + 1) = jinv.row(k).transpose();
  grads.col(0) = -grads.rightCols(dim).rowwise().sum();

  SimplexGeometry geom;
  geom.dim = dim;
  geom.measure = measure;
  geom.diameter = diameter;
  geom.lambda_gradients = std::sqrt(measure) * grads;
  geom.p1_stiffness = geom.lambda_gradients.transpose() * geom.lambda_gradients;
  geom.bubble_scale = std::pow(dim + 1.0, dim + 1);
  return geom;
}

BubbleConstants bubble_constants(const SimplexGeometry& geom) {
  const int d = geom.dim;
  BubbleConstants c;
  c.eta_d = std::pow(2.0, d - 1) * factorial(d) / factorial(3 * d);
  c.c_d = factorial(d) * factorial(3 * d) / (std::pow(2.0, d - 1) * std::pow(factorial(2 * d + 1), 2));
  c.g_scale = geom.bubble_scale * std::sqrt(geom.measure) * factorial(d) / factorial(2 * d + 1);
  return c;
}

Eigen::MatrixXd bubble_stiffness(const SimplexGeometry& geom, double lambda_lame, double mu) {
  require_mu(mu);
  const double alpha = geom.bubble_scale;
  const double eta = bubble_constants(geom).eta_d;
  const Eigen::MatrixXd& lam = geom.lambda_gradients;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(geom.dim, geom.dim);
  return alpha * alpha * eta * (mu * geom.p1_stiffness.trace() * id + (lambda_lame + mu) * lam * lam.transpose());
}

Eigen::MatrixXd bubble_divergence(const SimplexGeometry& geom) {
  return bubble_constants(geom).g_scale * geom.lambda_gradients;
}

Eigen::MatrixXd bubble_schur(const SimplexGeometry& geom, double lambda_lame, double mu) {
  require_mu(mu);
  const double trace = geom.p1_stiffness.trace();
  const double sigma = bubble_constants(geom).c_d * geom.measure / (mu * trace);
  const double beta = (lambda_lame + mu) / (mu * trace);
  const auto n = geom.p1_stiffness.rows();
  const Eigen::MatrixXd shifted = Eigen::MatrixXd::Identity(n, n) + beta * geom.p1_stiffness;
  // (I + beta L) commutes with L, so (I + beta L)^{-1} L = L (I + beta L)^{-1}.
  Eigen::MatrixXd s = sigma * shifted.llt().solve(geom.p1_stiffness);
  return 0.5 * (s + s.transpose());
}

Eigen::MatrixXd p1_elasticity(const SimplexGeometry& geom, double lambda_lame, double mu) {
  const int d = geom.dim;
  const int nv = d + 1;
  const Eigen::MatrixXd& lam = geom.lambda_gradients;
  const Eigen::MatrixXd& stiff = geom.p1_stiffness;
  Eigen::MatrixXd k(d * nv, d * nv);
  for (int a = 0; a < nv; ++a) {
    for (int i = 0; i < d; ++i) {
      for (int b = 0; b < nv; ++b) {
        for (int j = 0; j < d; ++j) {
          double v = mu * lam(i, b) * lam(j, a) + lambda_lame * lam(i, a) * lam(j, b);
          if (i == j) v += mu * stiff(a, b);
          k(a * d + i, b * d + j) = v;
        }
      }
    }
  }
  return k;
}

Eigen::MatrixXd p1_divergence(const SimplexGeometry& geom) {
  const int d = geom.dim;
  const int nv = d + 1;
  const Eigen::MatrixXd grads = geom.gradients();
  Eigen::MatrixXd b(nv, d * nv);
  const double w = geom.measure / nv;
  for (int k = 0; k < nv; ++k) {
    for (int a = 0; a < nv; ++a) {
      for (int i = 0; i < d; ++i) b(k, a * d + i) = -grads(i, a) * w;
    }
  }
  return b;
}

Eigen::MatrixXd p1_mass(const SimplexGeometry& geom) {
  const int nv = geom.dim + 1;
  // int lambda_j lambda_k = |T| d! (1 + delta_jk) / (d + 2)!
  const double base = geom.measure * factorial(geom.dim) / factorial(geom.dim + 2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(nv, nv, base);
  m.diagonal().array() += base;
  return m;
}

}  // namespace biot
