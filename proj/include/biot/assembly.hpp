#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biot/linalg.hpp"
#include "biot/material.hpp"
#include "biot/mesh.hpp"

namespace biot {

class BoundaryConditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Displacement space. P2_1D is represented hierarchically as P1 plus the
/// element bubble 4 lambda_0 lambda_1, so it shares the bubble code path.
enum class DisplacementSpace { P1, P2_1D, P1PlusBubble };

inline bool has_bubbles(DisplacementSpace s) { return s != DisplacementSpace::P1; }

/// 2D stabilization weight: `Plain` uses epsilon, `Youngs` uses epsilon/E_T.
enum class StabWeight { Plain, Youngs };

enum class DisplacementCondition { Free, Fixed, Tied };
enum class PressureCondition { NoFlux, Drained };

/// Conditions on one side of the domain. Free components carry `traction`
/// (force per unit boundary measure). Tied components share one unknown per
/// side and the group receives `tied_force` as a resultant.
struct SideCondition {
  std::array<DisplacementCondition, 2> displacement{DisplacementCondition::Free, DisplacementCondition::Free};
  PressureCondition pressure = PressureCondition::NoFlux;
  std::array<double, 2> traction{0.0, 0.0};
  std::array<double, 2> tied_force{0.0, 0.0};
};

/// Boundary specification by side. In 1D only Left and Right are used and
/// only component 0 is read.
struct BoundarySpec {
  std::array<std::optional<SideCondition>, 4> sides;

  SideCondition& set(Side s, SideCondition c) { return *(sides[static_cast<int>(s)] = c); }
  const std::optional<SideCondition>& get(Side s) const { return sides[static_cast<int>(s)]; }
};

/// Global numbering. Full displacement DOFs are [vertex dofs interleaved
/// (d*v + comp) | bubble dofs (d*cell + comp)]; pressure DOFs are vertices.
/// Reduced DOFs drop essential conditions and merge tied groups.
struct DofMap {
  int dim = 1;
  int n_vertices = 0;
  int n_cells = 0;
  bool bubbles = false;
  std::vector<int> disp_to_reduced;
  std::vector<int> pressure_to_reduced;
  int n_disp = 0;
  int n_pressure = 0;
  /// Full index of the first member of every tied group.
  std::vector<int> tied_masters;
  SparseMatrix disp_prolongation;
  SparseMatrix pressure_prolongation;

  int n_disp_full() const { return dim * n_vertices + (bubbles ? dim * n_cells : 0); }
  int n_pressure_full() const { return n_vertices; }
  int vertex_dof(int v, int comp) const { return dim * v + comp; }
  int bubble_dof(int cell, int comp) const { return dim * n_vertices + dim * cell + comp; }

  Eigen::VectorXd expand_displacement(const Eigen::VectorXd& reduced) const;
  Eigen::VectorXd expand_pressure(const Eigen::VectorXd& reduced) const;
  /// Picks reduced values out of a full vector (inverse of expansion on
  /// vectors that satisfy the constraints).
  Eigen::VectorXd pick_displacement(const Eigen::VectorXd& full) const;
  Eigen::VectorXd pick_pressure(const Eigen::VectorXd& full) const;
  /// P^T v: accumulates a full load vector onto reduced DOFs.
  Eigen::VectorXd restrict_displacement(const Eigen::VectorXd& full) const;
  Eigen::VectorXd restrict_pressure(const Eigen::VectorXd& full) const;
};

struct BiotBlocks {
  SparseMatrix A;   ///< elasticity
  SparseMatrix B;   ///< -(div u, q), pressure rows
  SparseMatrix Ap;  ///< K-weighted pressure Laplacian
  SparseMatrix Mp;  ///< consistent pressure mass
  SparseMatrix C;   ///< stabilization
};

struct BiotSystem {
  std::shared_ptr<const SimplexMesh> mesh;
  MaterialField material;
  DisplacementSpace space = DisplacementSpace::P1;
  double epsilon = 0.0;
  StabWeight stab_weight = StabWeight::Plain;
  DofMap dofs;
  BiotBlocks full;
  BiotBlocks reduced;
  /// Boundary traction and tied resultants, full displacement numbering.
  Eigen::VectorXd boundary_load;
};

SparseMatrix assemble_elasticity(const SimplexMesh& mesh, const MaterialField& material, DisplacementSpace space);
SparseMatrix assemble_divergence(const SimplexMesh& mesh, DisplacementSpace space);
SparseMatrix assemble_pressure_laplacian(const SimplexMesh& mesh, const MaterialField& material);
SparseMatrix assemble_pressure_mass(const SimplexMesh& mesh);
/// Sum over cells of w_T h_T^2 L_T. In 1D the weight is always
/// epsilon/(lambda+2mu), which reproduces the tridiagonal A_epsilon.
SparseMatrix assemble_stabilization(const SimplexMesh& mesh, const MaterialField& material, double epsilon,
                                    StabWeight weight = StabWeight::Plain);

DofMap build_dof_map(const SimplexMesh& mesh, DisplacementSpace space, const BoundarySpec& bc);
/// Boundary traction (2-point Gauss per edge) plus tied-group resultants.
Eigen::VectorXd boundary_load_vector(const SimplexMesh& mesh, const DofMap& dofs, const BoundarySpec& bc);
/// Symmetric elimination: returns P^T M P for each block.
BiotBlocks apply_boundary_conditions(const BiotBlocks& full, const DofMap& dofs);

BiotSystem assemble_system(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                           DisplacementSpace space, double epsilon, StabWeight weight = StabWeight::Plain);

}  // namespace biot
