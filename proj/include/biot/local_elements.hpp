#pragma once

#include <array>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace biot {

class DegenerateSimplexError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-simplex geometric data for d in {1, 2}.
///
/// `lambda_gradients` is the d x (d+1) matrix whose columns are the
/// barycentric gradients scaled by sqrt(|T|), so that
/// `p1_stiffness = Lambda^T Lambda` is the P1 Laplace element matrix.
struct SimplexGeometry {
  int dim = 1;
  double measure = 0.0;
  double diameter = 0.0;
  Eigen::MatrixXd lambda_gradients;
  Eigen::MatrixXd p1_stiffness;
  /// Normalisation of the bubble so that it equals 1 at the barycentre.
  double bubble_scale = 0.0;

  /// Unscaled barycentric gradients, d x (d+1).
  Eigen::MatrixXd gradients() const { return lambda_gradients / std::sqrt(measure); }
};

struct BubbleConstants {
  double eta_d = 0.0;
  double c_d = 0.0;
  /// Factor in G_{b,T} = g_scale * Lambda; depends on |T|.
  double g_scale = 0.0;
};

/// Simplex from d+1 points; for d == 1 only the x coordinate is used.
SimplexGeometry simplex_geometry(std::span<const std::array<double, 2>> vertices, int dim);

BubbleConstants bubble_constants(const SimplexGeometry& geom);

/// a(phi e_k, phi e_j) for the bubble of T, a d x d SPD matrix.
Eigen::MatrixXd bubble_stiffness(const SimplexGeometry& geom, double lambda_lame, double mu);

/// (G_{b,T})_{jk} = int_T phi e_j . grad lambda_k, a d x (d+1) matrix.
Eigen::MatrixXd bubble_divergence(const SimplexGeometry& geom);

/// Local Schur complement G^T A^{-1} G of the bubble, evaluated through the
/// closed form sigma L (I + beta L)^{-1}.
Eigen::MatrixXd bubble_schur(const SimplexGeometry& geom, double lambda_lame, double mu);

/// P1 vector elasticity element matrix, DOF (vertex a, component i) at a*d+i.
Eigen::MatrixXd p1_elasticity(const SimplexGeometry& geom, double lambda_lame, double mu);

/// -(div u, q) for P1 u and P1 q: (d+1) x d(d+1), rows are pressure vertices.
Eigen::MatrixXd p1_divergence(const SimplexGeometry& geom);

/// P1 mass matrix int_T lambda_j lambda_k.
Eigen::MatrixXd p1_mass(const SimplexGeometry& geom);

}  // namespace biot
