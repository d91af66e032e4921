#include "biot/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "biot/local_elements.hpp"

namespace biot {

MonotonicityReport m_matrix_check(const SparseMatrix& matrix, double tol) {
  if (matrix.rows() != matrix.cols()) throw ShapeError("m_matrix_check needs a square matrix");
  MonotonicityReport rep;
  const double bound = tol * max_abs_entry(matrix);
  for (Eigen::Index r = 0; r < matrix.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix, r); it; ++it) {
      if (it.col() != r && it.value() > bound) rep.violating_entries.push_back({static_cast<long>(r), static_cast<long>(it.col()), it.value()});
    }
  }
  rep.positive_offdiag_count = static_cast<long>(rep.violating_entries.size());
  return rep;
}

namespace {

double restriction_divisor(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::P1P1: return 4.0;
    case SchemeKind::TaylorHood1D: return 6.0;
    case SchemeKind::MINI: break;
  }
  throw UnsupportedError("no monotonicity restriction is derived for the MINI scheme");
}

}  // namespace

RestrictionThreshold restriction_threshold(const SimplexMesh& mesh, const MaterialField& material, SchemeKind scheme) {
  if (mesh.dim() != 1) throw UnsupportedError("monotonicity restrictions are only derived for 1D meshes");
  RestrictionThreshold r;
  r.divisor = restriction_divisor(scheme);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double h = mesh.cell_diameter(c);
    const double ke = material.permeability(c) * material.constrained_modulus(c);
    const double t = ke > 0.0 ? h * h / (r.divisor * ke) : std::numeric_limits<double>::infinity();
    r.tau_min = std::max(r.tau_min, t);
  }
  return r;
}

double max_uniform_h(double ekt, SchemeKind scheme) {
  if (!(ekt > 0.0)) throw std::invalid_argument("E K tau must be positive");
  return std::sqrt(restriction_divisor(scheme) * ekt);
}

int required_divisions(double length, double ekt, SchemeKind scheme) {
  const double n = length / max_uniform_h(ekt, scheme);
  // Guard against n landing a few ulps above an integer.
  return static_cast<int>(std::ceil(n * (1.0 - 1e-12)));
}

double restriction_margin(const SimplexMesh& mesh, const MaterialField& material, SchemeKind scheme, double tau) {
  const double margin = restriction_threshold(mesh, material, scheme).tau_min - tau;
  return std::abs(margin) <= 1e-12 * tau ? 0.0 : margin;
}

long oscillation_score(const std::vector<double>& profile, long reference_segments) {
  if (profile.size() < 3) throw std::invalid_argument("oscillation_score needs at least 3 samples");
  const auto [mn, mx] = std::minmax_element(profile.begin(), profile.end());
  const double floor = 1e-8 * (*mx - *mn);
  long changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    const double d = profile[i] - profile[i - 1];
    if (std::abs(d) <= floor) continue;
    const int sign = d > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++changes;
    last_sign = sign;
  }
  return std::max(0L, changes - reference_segments);
}

double max_overshoot(const std::vector<double>& profile, double lo, double hi) {
  double over = 0.0;
  for (double v : profile) over = std::max({over, v - hi, lo - v});
  return over;
}

SpectralReport spectral_equivalence_report(const SimplexMesh& mesh, const MaterialField& material) {
  if (material.size() != mesh.num_cells()) throw MaterialError("material does not match mesh");
  SpectralReport rep;
  rep.global_min = std::numeric_limits<double>::infinity();
  rep.global_max = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto geom = simplex_geometry(mesh.cell_points(c), mesh.dim());
    const Eigen::MatrixXd s = bubble_schur(geom, material.lame_lambda(c), material.lame_mu(c));
    const double h = mesh.cell_diameter(c);
    const Eigen::VectorXd ev = eigenvalues_on_complement(s, h * h * geom.p1_stiffness);
    ElementBracket b{ev.minCoeff(), ev.maxCoeff()};
    rep.global_min = std::min(rep.global_min, b.lo);
    rep.global_max = std::max(rep.global_max, b.hi);
    rep.elements.push_back(b);
  }
  return rep;
}

namespace {

struct QuadPoint {
  std::array<double, 3> bary;
  double weight;  // fraction of the cell measure
};

std::vector<QuadPoint> cell_rule(int dim) {
  if (dim == 1) {
    const double g = 0.5 * std::sqrt(0.6);
    return {{{0.5 + g, 0.5 - g, 0.0}, 5.0 / 18.0}, {{0.5, 0.5, 0.0}, 8.0 / 18.0}, {{0.5 - g, 0.5 + g, 0.0}, 5.0 / 18.0}};
  }
  // Six-point rule, exact for degree 4.
  const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2, w2 = 0.109951743655322;
  return {{{b1, a1, a1}, w1}, {{a1, b1, a1}, w1}, {{a1, a1, b1}, w1},
          {{b2, a2, a2}, w2}, {{a2, b2, a2}, w2}, {{a2, a2, b2}, w2}};
}

}  // namespace

ErrorNorms error_norms(const Eigen::VectorXd& numeric, const ScalarField& exact, const SimplexMesh& mesh,
                       const MaterialField& material, double tau) {
  if (numeric.size() != static_cast<Eigen::Index>(mesh.num_vertices())) throw ShapeError("pressure vector does not match the mesh");
  if (material.size() != mesh.num_cells()) throw MaterialError("material does not match mesh");
  const int d = mesh.dim();
  const int nv = d + 1;
  const auto rule = cell_rule(d);
  double l2 = 0.0;
  double grad = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = mesh.cell_points(c);
    const auto geom = simplex_geometry(pts, d);
    const Eigen::MatrixXd g = geom.gradients();
    const auto verts = mesh.cell(c);

    // P2 interpolant: vertex values then edge midpoint values.
    std::array<double, 3> vert_val{};
    std::array<double, 3> num_val{};
    for (int a = 0; a < nv; ++a) {
      vert_val[static_cast<std::size_t>(a)] = exact(pts[static_cast<std::size_t>(a)][0], pts[static_cast<std::size_t>(a)][1]);
      num_val[static_cast<std::size_t>(a)] = numeric[verts[static_cast<std::size_t>(a)]];
    }
    std::vector<std::array<int, 2>> edges;
    for (int a = 0; a < nv; ++a) {
      for (int b = a + 1; b < nv; ++b) edges.push_back({a, b});
    }
    std::vector<double> mid_val;
    for (const auto& e : edges) {
      const auto& p = pts[static_cast<std::size_t>(e[0])];
      const auto& q = pts[static_cast<std::size_t>(e[1])];
      mid_val.push_back(exact(0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])));
    }

    double cell_l2 = 0.0;
    double cell_grad = 0.0;
    for (const auto& qp : rule) {
      const auto& lam = qp.bary;
      double e = 0.0;
      Eigen::VectorXd ge = Eigen::VectorXd::Zero(d);
      for (int a = 0; a < nv; ++a) {
        const double la = lam[static_cast<std::size_t>(a)];
        const double va = vert_val[static_cast<std::size_t>(a)];
        const double na = num_val[static_cast<std::size_t>(a)];
        e += va * la * (2.0 * la - 1.0) - na * la;
        ge += (va * (4.0 * la - 1.0) - na) * g.col(a);
      }
      for (std::size_t k = 0; k < edges.size(); ++k) {
        const int a = edges[k][0];
        const int b = edges[k][1];
        const double la = lam[static_cast<std::size_t>(a)];
        const double lb = lam[static_cast<std::size_t>(b)];
        e += mid_val[k] * 4.0 * la * lb;
        ge += mid_val[k] * 4.0 * (la * g.col(b) + lb * g.col(a));
      }
      cell_l2 += qp.weight * e * e;
      cell_grad += qp.weight * ge.squaredNorm();
    }
    l2 += geom.measure * cell_l2;
    grad += geom.measure * material.permeability(c) * cell_grad;
  }
  ErrorNorms out;
  out.l2_pressure = std::sqrt(l2);
  out.energy_pressure = std::sqrt(l2 + tau * grad);
  return out;
}

double tau_h_norm(const BiotSystem& system, const Eigen::VectorXd& u, const Eigen::VectorXd& p, double tau) {
  const auto& r = system.reduced;
  const double v = u.dot(r.A * u) + tau * p.dot(r.Ap * p) + p.dot(r.C * p);
  return std::sqrt(std::max(0.0, v));
}

double discrete_energy(const BiotSystem& system, const State& s) {
  return s.U.dot(system.reduced.A * s.U) + s.P.dot(system.reduced.C * s.P);
}

nlohmann::json to_json(const MonotonicityReport& r) {
  nlohmann::json j;
  j["positive_offdiag_count"] = r.positive_offdiag_count;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : r.violating_entries) entries.push_back({{"row", e.row}, {"col", e.col}, {"value", e.value}});
  j["violating_entries"] = entries;
  j["restriction_margin"] = r.restriction_margin ? nlohmann::json(*r.restriction_margin) : nlohmann::json(nullptr);
  j["oscillation_score"] = r.oscillation_score ? nlohmann::json(*r.oscillation_score) : nlohmann::json(nullptr);
  j["max_overshoot"] = r.max_overshoot ? nlohmann::json(*r.max_overshoot) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ErrorNorms& n) {
  nlohmann::json j{{"l2_pressure", n.l2_pressure}, {"energy_pressure", n.energy_pressure}};
  j["tau_h_norm"] = n.tau_h_norm ? nlohmann::json(*n.tau_h_norm) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const SpectralReport& r) {
  return {{"global_min", r.global_min}, {"global_max", r.global_max}, {"elements", r.elements.size()}};
}

}  // namespace biot
