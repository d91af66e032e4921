#include "biot/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "biot/local_elements.hpp"

namespace biot {
namespace {

SimplexGeometry cell_geometry(const SimplexMesh& mesh, std::size_t c) {
  const auto pts = mesh.cell_points(c);
  return simplex_geometry(pts, mesh.dim());
}

void check_material(const SimplexMesh& mesh, const MaterialField& material) {
  if (material.size() != mesh.num_cells()) {
    throw MaterialError("material has " + std::to_string(material.size()) + " cells, mesh has " + std::to_string(mesh.num_cells()));
  }
}

void check_space(const SimplexMesh& mesh, DisplacementSpace space) {
  if (space == DisplacementSpace::P2_1D && mesh.dim() != 1) {
    throw std::invalid_argument("quadratic displacement space is only available in 1D");
  }
}

int full_disp_size(const SimplexMesh& mesh, DisplacementSpace space) {
  const int d = mesh.dim();
  return d * static_cast<int>(mesh.num_vertices()) + (has_bubbles(space) ? d * static_cast<int>(mesh.num_cells()) : 0);
}

std::vector<Side> required_sides(int dim) {
  if (dim == 1) return {Side::Left, Side::Right};
  return {kAllSides.begin(), kAllSides.end()};
}

SparseMatrix prolongation(const std::vector<int>& map, int n_reduced) {
  Triplets t;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] >= 0) t.emplace_back(static_cast<int>(i), map[i], 1.0);
  }
  return from_triplets(static_cast<long>(map.size()), n_reduced, t);
}

}  // namespace

SparseMatrix assemble_elasticity(const SimplexMesh& mesh, const MaterialField& material, DisplacementSpace space) {
  check_material(mesh, material);
  check_space(mesh, space);
  const int d = mesh.dim();
  const int nv = static_cast<int>(mesh.num_vertices());
  const int n = full_disp_size(mesh, space);
  Triplets t;
  t.reserve(mesh.num_cells() * static_cast<std::size_t>((d * (d + 1)) * (d * (d + 1)) + d * d));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto geom = cell_geometry(mesh, c);
    const double lam = material.lame_lambda(c);
    const double mu = material.lame_mu(c);
    const Eigen::MatrixXd k = p1_elasticity(geom, lam, mu);
    const auto verts = mesh.cell(c);
    for (int a = 0; a <= d; ++a) {
      for (int i = 0; i < d; ++i) {
        for (int b = 0; b <= d; ++b) {
          for (int j = 0; j < d; ++j) {
            t.emplace_back(d * verts[static_cast<std::size_t>(a)] + i, d * verts[static_cast<std::size_t>(b)] + j, k(a * d + i, b * d + j));
          }
        }
      }
    }
    if (has_bubbles(space)) {
      // The linear-bubble coupling vanishes identically, so only the
      // per-cell bubble block is stored.
      const Eigen::MatrixXd kb = bubble_stiffness(geom, lam, mu);
      const int base = d * nv + d * static_cast<int>(c);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) t.emplace_back(base + i, base + j, kb(i, j));
      }
    }
  }
  return from_triplets(n, n, t);
}

SparseMatrix assemble_divergence(const SimplexMesh& mesh, DisplacementSpace space) {
  check_space(mesh, space);
  const int d = mesh.dim();
  const int nv = static_cast<int>(mesh.num_vertices());
  Triplets t;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto geom = cell_geometry(mesh, c);
    const Eigen::MatrixXd b = p1_divergence(geom);
    const auto verts = mesh.cell(c);
    for (int k = 0; k <= d; ++k) {
      const int row = verts[static_cast<std::size_t>(k)];
      for (int a = 0; a <= d; ++a) {
        for (int i = 0; i < d; ++i) t.emplace_back(row, d * verts[static_cast<std::size_t>(a)] + i, b(k, a * d + i));
      }
    }
    if (has_bubbles(space)) {
      // -(div(phi e_j), lambda_k) = (phi, d_j lambda_k) = G_{jk}.
      const Eigen::MatrixXd g = bubble_divergence(geom);
      const int base = d * nv + d * static_cast<int>(c);
      for (int k = 0; k <= d; ++k) {
        for (int j = 0; j < d; ++j) t.emplace_back(verts[static_cast<std::size_t>(k)], base + j, g(j, k));
      }
    }
  }
  return from_triplets(nv, full_disp_size(mesh, space), t);
}

SparseMatrix assemble_pressure_laplacian(const SimplexMesh& mesh, const MaterialField& material) {
  check_material(mesh, material);
  const int nv = static_cast<int>(mesh.num_vertices());
  Triplets t;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto geom = cell_geometry(mesh, c);
    const double k = material.permeability(c);
    const auto verts = mesh.cell(c);
    for (int a = 0; a <= mesh.dim(); ++a) {
      for (int b = 0; b <= mesh.dim(); ++b) {
        t.emplace_back(verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)], k * geom.p1_stiffness(a, b));
      }
    }
  }
  return from_triplets(nv, nv, t);
}

SparseMatrix assemble_pressure_mass(const SimplexMesh& mesh) {
  const int nv = static_cast<int>(mesh.num_vertices());
  Triplets t;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::MatrixXd m = p1_mass(cell_geometry(mesh, c));
    const auto verts = mesh.cell(c);
    for (int a = 0; a <= mesh.dim(); ++a) {
      for (int b = 0; b <= mesh.dim(); ++b) t.emplace_back(verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)], m(a, b));
    }
  }
  return from_triplets(nv, nv, t);
}

SparseMatrix assemble_stabilization(const SimplexMesh& mesh, const MaterialField& material, double epsilon, StabWeight weight) {
  check_material(mesh, material);
  if (!(epsilon >= 0.0)) throw std::invalid_argument("stabilization parameter epsilon must be non-negative");
  const int nv = static_cast<int>(mesh.num_vertices());
  Triplets t;
  if (epsilon > 0.0) {
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto geom = cell_geometry(mesh, c);
      double w = epsilon;
      if (mesh.dim() == 1) {
        w = epsilon / material.constrained_modulus(c);
      } else if (weight == StabWeight::Youngs) {
        w = epsilon / material.young(c);
      }
      const double h = mesh.cell_diameter(c);
      const auto verts = mesh.cell(c);
      for (int a = 0; a <= mesh.dim(); ++a) {
        for (int b = 0; b <= mesh.dim(); ++b) {
          t.emplace_back(verts[static_cast<std::size_t>(a)], verts[static_cast<std::size_t>(b)], w * h * h * geom.p1_stiffness(a, b));
        }
      }
    }
  }
  return from_triplets(nv, nv, t);
}

DofMap build_dof_map(const SimplexMesh& mesh, DisplacementSpace space, const BoundarySpec& bc) {
  check_space(mesh, space);
  const int d = mesh.dim();
  DofMap dm;
  dm.dim = d;
  dm.n_vertices = static_cast<int>(mesh.num_vertices());
  dm.n_cells = static_cast<int>(mesh.num_cells());
  dm.bubbles = has_bubbles(space);

  for (Side s : required_sides(d)) {
    if (!bc.get(s)) throw BoundaryConditionError("boundary side '" + to_string(s) + "' has no condition");
  }
  if (d == 1 && (bc.get(Side::Top) || bc.get(Side::Bottom))) {
    throw BoundaryConditionError("1D meshes only have left and right boundaries");
  }

  // Per vertex and component: strongest condition and the tied group.
  const std::size_t nfull = static_cast<std::size_t>(dm.n_disp_full());
  std::vector<DisplacementCondition> status(nfull, DisplacementCondition::Free);
  std::vector<int> group(nfull, -1);
  std::vector<std::vector<int>> groups;
  std::vector<char> drained(static_cast<std::size_t>(dm.n_vertices), 0);

  for (Side s : required_sides(d)) {
    const SideCondition& sc = *bc.get(s);
    if (sc.pressure == PressureCondition::Drained) {
      for (int v : mesh.side_vertices(s)) drained[static_cast<std::size_t>(v)] = 1;
    }
    for (int comp = 0; comp < d; ++comp) {
      const auto cond = sc.displacement[static_cast<std::size_t>(comp)];
      if (cond == DisplacementCondition::Free) continue;
      int gid = -1;
      if (cond == DisplacementCondition::Tied) {
        gid = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      for (int v : mesh.side_vertices(s)) {
        const std::size_t dof = static_cast<std::size_t>(dm.vertex_dof(v, comp));
        if (cond == DisplacementCondition::Fixed) {
          if (group[dof] >= 0) {
            throw BoundaryConditionError("vertex " + std::to_string(v) + " is both fixed and tied in component " + std::to_string(comp));
          }
          status[dof] = DisplacementCondition::Fixed;
        } else {
          if (status[dof] == DisplacementCondition::Fixed) {
            throw BoundaryConditionError("vertex " + std::to_string(v) + " is both fixed and tied in component " + std::to_string(comp));
          }
          if (group[dof] >= 0) {
            throw BoundaryConditionError("vertex " + std::to_string(v) + " belongs to two tied groups");
          }
          status[dof] = DisplacementCondition::Tied;
          group[dof] = gid;
          groups[static_cast<std::size_t>(gid)].push_back(static_cast<int>(dof));
        }
      }
    }
  }

  dm.disp_to_reduced.assign(nfull, -1);
  std::vector<int> group_index(groups.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < nfull; ++i) {
    if (status[i] == DisplacementCondition::Fixed) continue;
    if (group[i] >= 0) {
      int& gi = group_index[static_cast<std::size_t>(group[i])];
      if (gi < 0) {
        gi = next++;
        dm.tied_masters.push_back(static_cast<int>(i));
      }
      dm.disp_to_reduced[i] = gi;
    } else {
      dm.disp_to_reduced[i] = next++;
    }
  }
  dm.n_disp = next;

  dm.pressure_to_reduced.assign(static_cast<std::size_t>(dm.n_vertices), -1);
  next = 0;
  for (int v = 0; v < dm.n_vertices; ++v) {
    if (!drained[static_cast<std::size_t>(v)]) dm.pressure_to_reduced[static_cast<std::size_t>(v)] = next++;
  }
  dm.n_pressure = next;

  dm.disp_prolongation = prolongation(dm.disp_to_reduced, dm.n_disp);
  dm.pressure_prolongation = prolongation(dm.pressure_to_reduced, dm.n_pressure);
  return dm;
}

Eigen::VectorXd DofMap::expand_displacement(const Eigen::VectorXd& reduced) const { return spmv(disp_prolongation, reduced); }
Eigen::VectorXd DofMap::expand_pressure(const Eigen::VectorXd& reduced) const { return spmv(pressure_prolongation, reduced); }
Eigen::VectorXd DofMap::restrict_displacement(const Eigen::VectorXd& full) const { return transpose_apply(disp_prolongation, full); }
Eigen::VectorXd DofMap::restrict_pressure(const Eigen::VectorXd& full) const { return transpose_apply(pressure_prolongation, full); }

Eigen::VectorXd DofMap::pick_displacement(const Eigen::VectorXd& full) const {
  if (full.size() != n_disp_full()) throw ShapeError("displacement vector has wrong length");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_disp);
  for (std::size_t i = disp_to_reduced.size(); i-- > 0;) {
    if (disp_to_reduced[i] >= 0) r[disp_to_reduced[i]] = full[static_cast<Eigen::Index>(i)];
  }
  return r;
}

Eigen::VectorXd DofMap::pick_pressure(const Eigen::VectorXd& full) const {
  if (full.size() != n_pressure_full()) throw ShapeError("pressure vector has wrong length");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n_pressure);
  for (std::size_t i = 0; i < pressure_to_reduced.size(); ++i) {
    if (pressure_to_reduced[i] >= 0) r[pressure_to_reduced[i]] = full[static_cast<Eigen::Index>(i)];
  }
  return r;
}

Eigen::VectorXd boundary_load_vector(const SimplexMesh& mesh, const DofMap& dofs, const BoundarySpec& bc) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.n_disp_full());
  const int d = mesh.dim();
  if (d == 1) {
    for (Side s : {Side::Left, Side::Right}) {
      const auto& sc = bc.get(s);
      if (!sc || sc->displacement[0] != DisplacementCondition::Free) continue;
      for (int v : mesh.side_vertices(s)) f[dofs.vertex_dof(v, 0)] += sc->traction[0];
    }
  } else {
    const auto& tri = dynamic_cast<const TriMesh&>(mesh);
    const double g = 0.5 / std::sqrt(3.0);
    const std::array<double, 2> gauss{0.5 - g, 0.5 + g};
    for (const auto& edge : tri.boundary_edges()) {
      const auto& sc = bc.get(edge.side);
      if (!sc) continue;
      const auto p = mesh.vertex(static_cast<std::size_t>(edge.vertices[0]));
      const auto q = mesh.vertex(static_cast<std::size_t>(edge.vertices[1]));
      const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
      for (int comp = 0; comp < 2; ++comp) {
        if (sc->displacement[static_cast<std::size_t>(comp)] != DisplacementCondition::Free) continue;
        const double tr = sc->traction[static_cast<std::size_t>(comp)];
        if (tr == 0.0) continue;
        for (double s : gauss) {
          f[dofs.vertex_dof(edge.vertices[0], comp)] += 0.5 * len * tr * (1.0 - s);
          f[dofs.vertex_dof(edge.vertices[1], comp)] += 0.5 * len * tr * s;
        }
      }
    }
  }

  // Tied resultants go to the group's master DOF.
  for (Side s : kAllSides) {
    const auto& sc = bc.get(s);
    if (!sc) continue;
    for (int comp = 0; comp < d; ++comp) {
      if (sc->displacement[static_cast<std::size_t>(comp)] != DisplacementCondition::Tied) continue;
      const auto& verts = mesh.side_vertices(s);
      if (verts.empty()) continue;
      const int master = *std::min_element(verts.begin(), verts.end());
      f[dofs.vertex_dof(master, comp)] += sc->tied_force[static_cast<std::size_t>(comp)];
    }
  }
  return f;
}

BiotBlocks apply_boundary_conditions(const BiotBlocks& full, const DofMap& dofs) {
  const SparseMatrix& pu = dofs.disp_prolongation;
  const SparseMatrix& pp = dofs.pressure_prolongation;
  if (full.A.rows() != pu.rows() || full.B.rows() != pp.rows()) throw ShapeError("blocks do not match the DOF map");
  auto reduce = [](const SparseMatrix& left, const SparseMatrix& m, const SparseMatrix& right) {
    SparseMatrix r = SparseMatrix(left.transpose()) * m * right;
    r.prune(0.0);
    r.makeCompressed();
    return r;
  };
  BiotBlocks red;
  red.A = reduce(pu, full.A, pu);
  red.B = reduce(pp, full.B, pu);
  red.Ap = reduce(pp, full.Ap, pp);
  red.Mp = reduce(pp, full.Mp, pp);
  red.C = reduce(pp, full.C, pp);
  return red;
}

BiotSystem assemble_system(std::shared_ptr<const SimplexMesh> mesh, const MaterialField& material, const BoundarySpec& bc,
                           DisplacementSpace space, double epsilon, StabWeight weight) {
  if (!mesh) throw std::invalid_argument("assemble_system: null mesh");
  BiotSystem sys;
  sys.mesh = mesh;
  sys.material = material;
  sys.space = space;
  sys.epsilon = epsilon;
  sys.stab_weight = weight;
  sys.dofs = build_dof_map(*mesh, space, bc);
  sys.full.A = assemble_elasticity(*mesh, material, space);
  sys.full.B = assemble_divergence(*mesh, space);
  sys.full.Ap = assemble_pressure_laplacian(*mesh, material);
  sys.full.Mp = assemble_pressure_mass(*mesh);
  sys.full.C = assemble_stabilization(*mesh, material, epsilon, weight);
  sys.reduced = apply_boundary_conditions(sys.full, sys.dofs);
  sys.boundary_load = boundary_load_vector(*mesh, sys.dofs, bc);
  return sys;
}

}  // namespace biot
