#include <gtest/gtest.h>

#include <memory>
#include <random>

#include "biot/assembly.hpp"
#include "test_support.hpp"

using namespace biot;
using namespace biot::testing;

namespace {

SideCondition side(DisplacementCondition ux, DisplacementCondition uy, PressureCondition p) {
  SideCondition s;
  s.displacement = {ux, uy};
  s.pressure = p;
  return s;
}

constexpr auto Free = DisplacementCondition::Free;
constexpr auto Fixed = DisplacementCondition::Fixed;
constexpr auto Tied = DisplacementCondition::Tied;
constexpr auto NoFlux = PressureCondition::NoFlux;
constexpr auto Drained = PressureCondition::Drained;

BoundarySpec box_bc() {
  BoundarySpec bc;
  bc.set(Side::Bottom, side(Fixed, Fixed, NoFlux));
  bc.set(Side::Left, side(Fixed, Free, NoFlux));
  bc.set(Side::Right, side(Free, Free, Drained));
  bc.set(Side::Top, side(Free, Tied, NoFlux));
  return bc;
}

MaterialField random_material(std::size_t n, std::mt19937& rng) {
  std::uniform_real_distribution<double> e(0.5, 5.0), nu(0.0, 0.45), k(0.1, 2.0);
  std::vector<double> ev, nv, kv;
  for (std::size_t c = 0; c < n; ++c) {
    ev.push_back(e(rng));
    nv.push_back(nu(rng));
    kv.push_back(k(rng));
  }
  return MaterialField(ev, nv, kv);
}

}  // namespace

TEST(Assembly, OperatorsAreSymmetric) {
  std::mt19937 rng(5);
  const TriMesh mesh = build_structured_tri_mesh(4, 3, 1.0, 1.0);
  const MaterialField mat = random_material(mesh.num_cells(), rng);
  for (auto space : {DisplacementSpace::P1, DisplacementSpace::P1PlusBubble}) {
    EXPECT_TRUE(is_symmetric(assemble_elasticity(mesh, mat, space), 1e-14));
  }
  EXPECT_TRUE(is_symmetric(assemble_pressure_laplacian(mesh, mat), 1e-14));
  EXPECT_TRUE(is_symmetric(assemble_pressure_mass(mesh), 1e-14));
  EXPECT_TRUE(is_symmetric(assemble_stabilization(mesh, mat, 0.3, StabWeight::Youngs), 1e-14));
}

TEST(Assembly, BubbleLinearCouplingVanishes) {
  const TriMesh mesh = build_structured_tri_mesh(2, 2, 1.0, 1.0);
  const MaterialField mat = MaterialField::uniform(mesh.num_cells(), 1.0, 0.2, 1.0);
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_elasticity(mesh, mat, DisplacementSpace::P1PlusBubble));
  const int nlin = 2 * static_cast<int>(mesh.num_vertices());
  EXPECT_EQ(a.topRightCorner(nlin, a.cols() - nlin).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, RigidMotionsInElasticityKernel) {
  const TriMesh mesh = build_structured_tri_mesh(3, 3, 1.0, 1.0);
  const MaterialField mat = MaterialField::uniform(mesh.num_cells(), 2.0, 0.3, 1.0);
  const SparseMatrix a = assemble_elasticity(mesh, mat, DisplacementSpace::P1);
  Eigen::VectorXd rot(a.rows());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    rot[2 * v] = -mesh.vertex(v)[1];
    rot[2 * v + 1] = mesh.vertex(v)[0];
  }
  EXPECT_LT((a * rot).norm(), 1e-12 * inf_norm(a));
}

TEST(Assembly, DivergenceAdjointIdentity) {
  // q^T B u equals -(div u_h, q_h) computed by quadrature, bubbles included.
  std::mt19937 rng(6);
  const TriMesh mesh = build_structured_tri_mesh(3, 2, 1.5, 1.0);
  const SparseMatrix b = assemble_divergence(mesh, DisplacementSpace::P1PlusBubble);
  const int nv = static_cast<int>(mesh.num_vertices());
  ASSERT_EQ(b.cols(), 2 * nv + 2 * static_cast<long>(mesh.num_cells()));
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd u = Eigen::VectorXd::Random(b.cols());
    const Eigen::VectorXd q = Eigen::VectorXd::Random(b.rows());
    double oracle = 0.0;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto pts = mesh.cell_points(c);
      const auto g = barycentric_gradients(pts, 2);
      const auto verts = mesh.cell(c);
      for (const auto& qp : simplex_rule(2)) {
        double div = 0.0, qh = 0.0;
        for (int a = 0; a < 3; ++a) {
          for (int i = 0; i < 2; ++i) div += u[2 * verts[a] + i] * g(i, a);
          qh += q[verts[a]] * qp.bary[a];
        }
        const Eigen::VectorXd gb = bubble_gradient(qp.bary, g, 2);
        for (int i = 0; i < 2; ++i) div += u[2 * nv + 2 * static_cast<int>(c) + i] * gb[i];
        oracle -= qp.weight * mesh.cell_measure(c) * div * qh;
      }
    }
    EXPECT_NEAR(q.dot(b * u), oracle, 1e-12 * (1.0 + std::abs(oracle)));
    EXPECT_NEAR(u.dot(transpose_apply(b, q)), oracle, 1e-12 * (1.0 + std::abs(oracle)));
  }
}

TEST(Stabilization, OneDimensionalStencils) {
  const IntervalMesh mesh = build_interval_mesh(8, 1.0);
  const MaterialField mat = MaterialField::uniform(8, 1.0, 0.0, 1.0);
  const double h = 1.0 / 8.0;
  for (double eps : {0.25, 1.0 / 6.0}) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_stabilization(mesh, mat, eps));
    EXPECT_NEAR(a(4, 3), -eps * h, 1e-15);
    EXPECT_NEAR(a(4, 4), 2.0 * eps * h, 1e-15);
    EXPECT_NEAR(a(4, 5), -eps * h, 1e-15);
  }
  EXPECT_EQ(max_abs_entry(assemble_stabilization(mesh, mat, 0.0)), 0.0);
  EXPECT_THROW(assemble_stabilization(mesh, mat, -1.0), std::invalid_argument);
}

TEST(Stabilization, OneDimensionalWeightUsesModulus) {
  const IntervalMesh mesh = build_interval_mesh(2, 1.0, std::vector<double>{0.25, 0.75});
  const MaterialField mat({2.0, 4.0}, {0.0, 0.0}, {1.0, 1.0});
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble_stabilization(mesh, mat, 0.25));
  EXPECT_NEAR(a(1, 1), 0.25 * (0.25 / 2.0 + 0.75 / 4.0), 1e-15);
  EXPECT_NEAR(a(0, 1), -0.25 * 0.25 / 2.0, 1e-15);
}

TEST(Stabilization, TwoDimensionalWeights) {
  const TriMesh mesh = build_structured_tri_mesh(2, 2, 1.0, 1.0);
  const MaterialField mat = MaterialField::uniform(mesh.num_cells(), 4.0, 0.0, 1.0);
  const SparseMatrix lap = assemble_pressure_laplacian(mesh, MaterialField::uniform(mesh.num_cells(), 4.0, 0.0, 1.0));
  // h_T^2 = 1/2 on this mesh, so w_T h_T^2 L_T = (eps / 2) L.
  const Eigen::MatrixXd plain = Eigen::MatrixXd(assemble_stabilization(mesh, mat, 0.5, StabWeight::Plain));
  const Eigen::MatrixXd youngs = Eigen::MatrixXd(assemble_stabilization(mesh, mat, 0.5, StabWeight::Youngs));
  EXPECT_LT((plain - 0.25 * Eigen::MatrixXd(lap)).norm(), 1e-14);
  EXPECT_LT((youngs - 0.25 / 4.0 * Eigen::MatrixXd(lap)).norm(), 1e-14);
}

TEST(PressureMass, IntegratesConstants) {
  const TriMesh mesh = build_structured_tri_mesh(3, 5, 2.0, 1.0);
  const SparseMatrix m = assemble_pressure_mass(mesh);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(m.rows());
  EXPECT_NEAR(one.dot(m * one), 2.0, 1e-13);
}

TEST(DofMap, TiedGroupSharesOneUnknown) {
  const TriMesh mesh = build_structured_tri_mesh(3, 2, 1.0, 1.0);
  const DofMap dm = build_dof_map(mesh, DisplacementSpace::P1, box_bc());
  ASSERT_EQ(dm.tied_masters.size(), 1u);
  const auto& top = mesh.side_vertices(Side::Top);
  const int r = dm.disp_to_reduced[dm.vertex_dof(top.front(), 1)];
  EXPECT_GE(r, 0);
  for (int v : top) EXPECT_EQ(dm.disp_to_reduced[dm.vertex_dof(v, 1)], r);
  EXPECT_EQ(dm.tied_masters.front(), dm.vertex_dof(top.front(), 1));
  // Fixed dofs on the bottom and left are eliminated.
  for (int v : mesh.side_vertices(Side::Bottom)) EXPECT_LT(dm.disp_to_reduced[dm.vertex_dof(v, 0)], 0);
  for (int v : mesh.side_vertices(Side::Right)) EXPECT_LT(dm.pressure_to_reduced[v], 0);
}

TEST(DofMap, ConflictingConditionsAreRejected) {
  const TriMesh mesh = build_structured_tri_mesh(2, 2, 1.0, 1.0);
  BoundarySpec bc = box_bc();
  bc.set(Side::Right, side(Free, Tied, Drained));  // shares corner with the tied top
  EXPECT_THROW(build_dof_map(mesh, DisplacementSpace::P1, bc), BoundaryConditionError);
  BoundarySpec fixed_tied = box_bc();
  fixed_tied.set(Side::Left, side(Fixed, Fixed, NoFlux));  // corner with top: fixed and tied in y
  EXPECT_THROW(build_dof_map(mesh, DisplacementSpace::P1, fixed_tied), BoundaryConditionError);
  BoundarySpec missing = box_bc();
  missing.sides[static_cast<int>(Side::Top)].reset();
  EXPECT_THROW(build_dof_map(mesh, DisplacementSpace::P1, missing), BoundaryConditionError);
}

TEST(DofMap, ExpandPickRoundTrip) {
  const TriMesh mesh = build_structured_tri_mesh(3, 3, 1.0, 1.0);
  const DofMap dm = build_dof_map(mesh, DisplacementSpace::P1PlusBubble, box_bc());
  const Eigen::VectorXd u = Eigen::VectorXd::Random(dm.n_disp);
  EXPECT_LT((dm.pick_displacement(dm.expand_displacement(u)) - u).norm(), 1e-15);
  const Eigen::VectorXd p = Eigen::VectorXd::Random(dm.n_pressure);
  EXPECT_LT((dm.pick_pressure(dm.expand_pressure(p)) - p).norm(), 1e-15);
  // Restriction is the transpose of expansion.
  const Eigen::VectorXd f = Eigen::VectorXd::Random(dm.n_disp_full());
  EXPECT_NEAR(f.dot(dm.expand_displacement(u)), dm.restrict_displacement(f).dot(u), 1e-12);
}

TEST(BoundaryConditions, ReductionIsProlongationSandwich) {
  std::mt19937 rng(7);
  const TriMesh mesh = build_structured_tri_mesh(3, 3, 1.0, 1.0);
  const MaterialField mat = random_material(mesh.num_cells(), rng);
  const BiotSystem sys = assemble_system(std::make_shared<TriMesh>(mesh), mat, box_bc(), DisplacementSpace::P1PlusBubble, 0.2,
                                         StabWeight::Youngs);
  const SparseMatrix& pu = sys.dofs.disp_prolongation;
  const SparseMatrix& pp = sys.dofs.pressure_prolongation;
  const Eigen::MatrixXd a = Eigen::MatrixXd(pu).transpose() * Eigen::MatrixXd(sys.full.A) * Eigen::MatrixXd(pu);
  const Eigen::MatrixXd b = Eigen::MatrixXd(pp).transpose() * Eigen::MatrixXd(sys.full.B) * Eigen::MatrixXd(pu);
  EXPECT_LT(rel_diff(Eigen::MatrixXd(sys.reduced.A), a), 1e-14);
  EXPECT_LT(rel_diff(Eigen::MatrixXd(sys.reduced.B), b), 1e-14);
  EXPECT_TRUE(is_symmetric(sys.reduced.A, 1e-14));
}

TEST(BoundaryLoad, TractionAndTiedResultants) {
  const TriMesh mesh = build_structured_tri_mesh(4, 3, 2.0, 1.0);
  BoundarySpec bc = box_bc();
  SideCondition top = side(Free, Tied, NoFlux);
  top.tied_force = {0.0, -3.0};
  top.traction = {0.5, 0.0};
  bc.set(Side::Top, top);
  const DofMap dm = build_dof_map(mesh, DisplacementSpace::P1, bc);
  const Eigen::VectorXd f = boundary_load_vector(mesh, dm, bc);
  double fx = 0.0, fy = 0.0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    fx += f[2 * v];
    fy += f[2 * v + 1];
  }
  EXPECT_NEAR(fx, 0.5 * 2.0, 1e-14);  // traction times side length
  EXPECT_NEAR(fy, -3.0, 1e-14);
  EXPECT_NEAR(f[dm.tied_masters.front()], -3.0, 1e-14);
}

TEST(BoundaryLoad, OneDimensionalEndForce) {
  const IntervalMesh mesh = build_interval_mesh(4, 1.0);
  BoundarySpec bc;
  SideCondition left = side(Free, Free, Drained);
  left.traction = {2.0, 0.0};
  bc.set(Side::Left, left);
  bc.set(Side::Right, side(Fixed, Free, NoFlux));
  const DofMap dm = build_dof_map(mesh, DisplacementSpace::P1, bc);
  const Eigen::VectorXd f = boundary_load_vector(mesh, dm, bc);
  EXPECT_DOUBLE_EQ(f[0], 2.0);
  EXPECT_DOUBLE_EQ(f.tail(4).cwiseAbs().sum(), 0.0);
}
