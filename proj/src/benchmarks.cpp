#include "biot/benchmarks.hpp"

#include <cmath>
#include <numbers>

namespace biot {

using std::numbers::pi;

double terzaghi_analytic(double x, double t, double modulus, double permeability, double height, double sigma0) {
  if (!(t > 0.0)) throw std::invalid_argument("terzaghi_analytic needs t > 0");
  if (x < 0.0 || x > height) throw std::invalid_argument("terzaghi_analytic: x outside [0, H]");
  const double p0 = std::abs(sigma0);
  const double rate = pi * pi * modulus * permeability * t / (4.0 * height * height);
  double sum = 0.0;
  for (long k = 0; k < 100000000L; ++k) {
    const double m = 2.0 * k + 1.0;
    const double decay = std::exp(-m * m * rate);
    if (decay < 1e-14) break;
    sum += 4.0 * p0 / (m * pi) * std::sin(m * pi * x / (2.0 * height)) * decay;
  }
  return sum;
}

std::vector<double> mandel_roots(double nu, double nu_u, int count) {
  if (!(nu_u > nu)) throw std::invalid_argument("mandel_roots needs nu_u > nu");
  if (count < 0) throw std::invalid_argument("mandel_roots: negative count");
  const double k = (1.0 - nu) / (nu_u - nu);
  if (!(k > 1.0)) throw std::invalid_argument("mandel_roots needs (1 - nu)/(nu_u - nu) > 1");
  // sin(a) - k a cos(a) has the roots of tan(a) = k a without the poles.
  auto g = [k](double a) { return std::sin(a) - k * a * std::cos(a); };
  auto dg = [k](double a) { return (1.0 - k) * std::cos(a) + k * a * std::sin(a); };

  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(count));
  for (int n = 1; n <= count; ++n) {
    double lo = (n - 1) * pi + (n == 1 ? 1e-8 : 0.0);
    double hi = (n - 1) * pi + 0.5 * pi;
    double glo = g(lo);
    const double ghi = g(hi);
    if (!(glo * ghi < 0.0)) throw std::runtime_error("mandel_roots: bracketing failed for root " + std::to_string(n));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    double a = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      const double next = a - g(a) / dg(a);
      if (!(next > lo - 1e-12 && next < hi + 1e-12)) break;
      a = next;
    }
    roots.push_back(a);
  }
  return roots;
}

MandelParams MandelParams::make(double a, double b, double force, double young, double nu, double permeability, int n_roots) {
  MandelParams p;
  p.a = a;
  p.b = b;
  p.force = force;
  p.skempton = 1.0;
  p.nu = nu;
  p.nu_u = (3.0 * nu + p.skempton * (1.0 - 2.0 * nu)) / (3.0 - p.skempton * (1.0 - 2.0 * nu));
  const double lam = MaterialField::lambda_from(young, nu);
  const double mu = MaterialField::mu_from(young, nu);
  p.consolidation = permeability * (lam + 2.0 * mu);
  p.p0 = p.skempton * (1.0 + p.nu_u) * force / (3.0 * a);
  p.roots = mandel_roots(nu, p.nu_u, n_roots);
  return p;
}

double mandel_analytic(double x, double t, const MandelParams& params, int n_terms) {
  if (!(t > 0.0)) throw std::invalid_argument("mandel_analytic needs t > 0");
  if (std::abs(x) > params.a * (1.0 + 1e-14)) throw std::invalid_argument("mandel_analytic: |x| > a");
  const double rate = params.consolidation * t / (params.a * params.a);
  const std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(std::max(n_terms, 0)), params.roots.size());
  double sum = 0.0;
  bool converged = false;
  for (std::size_t n = 0; n < limit; ++n) {
    const double al = params.roots[n];
    const double s = std::sin(al);
    const double c = std::cos(al);
    const double coef = s / (al - s * c);
    const double decay = std::exp(-al * al * rate);
    if (2.0 * std::abs(coef) * decay < 0.5e-14) {
      converged = true;
      break;
    }
    sum += coef * (std::cos(al * x / params.a) - c) * decay;
  }
  if (!converged && static_cast<std::size_t>(std::max(n_terms, 0)) > params.roots.size()) {
    throw std::runtime_error("mandel_analytic: insufficient roots for t = " + std::to_string(t));
  }
  return 2.0 * params.p0 * sum;
}

double BarryMercerParams::source(double t) const { return amplitude() * std::sin(beta * t); }

BarryMercerParams barry_mercer_params(double young, double nu, double permeability) {
  BarryMercerParams p;
  const double lam = MaterialField::lambda_from(young, nu);
  const double mu = MaterialField::mu_from(young, nu);
  p.beta = (lam + 2.0 * mu) * permeability / (p.a * p.b);
  return p;
}

SampledLine vertical_line(const TriMesh& mesh, int i) {
  if (i < 0 || i > mesh.nx()) throw MeshError("vertical line index outside the grid");
  SampledLine line;
  for (int j = 0; j <= mesh.ny(); ++j) {
    const int v = mesh.grid_vertex(i, j);
    line.vertices.push_back(v);
    line.coordinate.push_back(mesh.vertex(static_cast<std::size_t>(v))[1]);
  }
  line.description = "x = " + std::to_string(mesh.vertex(static_cast<std::size_t>(line.vertices.front()))[0]);
  return line;
}

SampledLine horizontal_line(const TriMesh& mesh, int j) {
  if (j < 0 || j > mesh.ny()) throw MeshError("horizontal line index outside the grid");
  SampledLine line;
  for (int i = 0; i <= mesh.nx(); ++i) {
    const int v = mesh.grid_vertex(i, j);
    line.vertices.push_back(v);
    line.coordinate.push_back(mesh.vertex(static_cast<std::size_t>(v))[0]);
  }
  line.description = "y = " + std::to_string(mesh.vertex(static_cast<std::size_t>(line.vertices.front()))[1]);
  return line;
}

SampledLine whole_interval(const IntervalMesh& mesh) {
  SampledLine line;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    line.vertices.push_back(static_cast<int>(v));
    line.coordinate.push_back(mesh.node_coords()[v]);
  }
  line.description = "whole column";
  return line;
}

namespace {

SideCondition side(DisplacementCondition ux, DisplacementCondition uy, PressureCondition p) {
  SideCondition sc;
  sc.displacement = {ux, uy};
  sc.pressure = p;
  return sc;
}

constexpr auto kFree = DisplacementCondition::Free;
constexpr auto kFixed = DisplacementCondition::Fixed;
constexpr auto kTied = DisplacementCondition::Tied;
constexpr auto kNoFlux = PressureCondition::NoFlux;
constexpr auto kDrained = PressureCondition::Drained;

}  // namespace

Scenario build_terzaghi_scenario(int n, double height, double young, double permeability, double sigma0, double tau) {
  auto mesh = std::make_shared<IntervalMesh>(build_interval_mesh(n, height));
  Scenario s;
  s.name = "terzaghi";
  s.material = MaterialField::uniform(mesh->num_cells(), young, 0.0, permeability);
  // Surface force on the left end is -sigma0 (outward normal -x).
  SideCondition top = side(kFree, kFree, kDrained);
  top.traction = {-sigma0, 0.0};
  s.bc.set(Side::Left, top);
  s.bc.set(Side::Right, side(kFixed, kFree, kNoFlux));
  s.line = whole_interval(*mesh);
  s.reference_segments = 0;
  s.analytic = [=](double x, double, double t) { return terzaghi_analytic(x, t, young, permeability, height, sigma0); };
  s.time = {tau, 1};
  s.recommended_weight = StabWeight::Youngs;
  s.bounds = std::make_pair(0.0, std::abs(sigma0));
  s.mesh = std::move(mesh);
  return s;
}

Scenario build_layered_scenario(int n, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("layered scenario dimension must be 1 or 2");
  Scenario s;
  s.name = "layered";
  auto in_layer = [](double y) { return y > 0.25 && y < 0.75; };
  if (n % 4 != 0) {
    s.warnings.push_back("layer interfaces at 1/4 and 3/4 are not resolved by a mesh with " + std::to_string(n) + " divisions");
  }
  if (dim == 1) {
    auto mesh = std::make_shared<IntervalMesh>(build_interval_mesh(n, 1.0));
    std::vector<double> k(mesh->num_cells(), 1.0);
    for (std::size_t c = 0; c < k.size(); ++c) {
      const double mid = 0.5 * (mesh->node_coords()[c] + mesh->node_coords()[c + 1]);
      if (in_layer(mid)) k[c] = 1e-8;
    }
    s.material = MaterialField(std::vector<double>(k.size(), 1.0), std::vector<double>(k.size(), 0.0), k);
    // Coordinate is depth: the loaded drained top sits at x = 0.
    SideCondition top = side(kFree, kFree, kDrained);
    top.traction = {1.0, 0.0};
    s.bc.set(Side::Left, top);
    s.bc.set(Side::Right, side(kFixed, kFree, kNoFlux));
    s.line = whole_interval(*mesh);
    s.mesh = std::move(mesh);
  } else {
    auto mesh = std::make_shared<TriMesh>(build_structured_tri_mesh(n, n, 1.0, 1.0));
    std::vector<double> k(mesh->num_cells(), 1.0);
    for (std::size_t c = 0; c < k.size(); ++c) {
      const auto pts = mesh->cell_points(c);
      const double yc = (pts[0][1] + pts[1][1] + pts[2][1]) / 3.0;
      if (in_layer(yc)) k[c] = 1e-8;
    }
    s.material = MaterialField(std::vector<double>(k.size(), 1.0), std::vector<double>(k.size(), 0.0), k);
    SideCondition top = side(kFree, kFree, kDrained);
    top.traction = {0.0, -1.0};
    s.bc.set(Side::Top, top);
    // Rigid frictionless walls keep the solution one-dimensional.
    s.bc.set(Side::Bottom, side(kFixed, kFixed, kNoFlux));
    for (Side sd : {Side::Left, Side::Right}) s.bc.set(sd, side(kFixed, kFree, kNoFlux));
    s.line = vertical_line(*mesh, (n + 1) / 2);
    s.recommended_epsilon = 0.5;
    s.mesh = std::move(mesh);
  }
  s.reference_segments = 0;
  s.time = {1.0, 1};
  s.recommended_weight = StabWeight::Youngs;
  s.bounds = std::make_pair(0.0, 1.0);
  return s;
}

Scenario build_mandel_scenario(int nx, int ny, double young, double nu, double permeability, double force) {
  const double a = 1.0;
  const double b = 1.0;
  auto mesh = std::make_shared<TriMesh>(build_structured_tri_mesh(nx, ny, a, b));
  Scenario s;
  s.name = "mandel";
  s.material = MaterialField::uniform(mesh->num_cells(), young, nu, permeability);
  s.bc.set(Side::Left, side(kFixed, kFree, kNoFlux));
  s.bc.set(Side::Bottom, side(kFree, kFixed, kNoFlux));
  s.bc.set(Side::Right, side(kFree, kFree, kDrained));
  SideCondition plate = side(kFree, kTied, kNoFlux);
  plate.tied_force = {0.0, -force};
  s.bc.set(Side::Top, plate);
  s.line = horizontal_line(*mesh, (ny + 1) / 2);
  s.reference_segments = 0;
  auto params = std::make_shared<const MandelParams>(MandelParams::make(a, b, force, young, nu, permeability));
  s.analytic = [params](double x, double, double t) { return mandel_analytic(x, t, *params); };
  s.time = {1e-4, 1};
  s.recommended_weight = StabWeight::Youngs;
  s.recommended_epsilon = 1.0 / 6.0;
  s.symmetry_copies = 4;
  s.mesh = std::move(mesh);
  return s;
}

Scenario build_barry_mercer_scenario(int nx, int ny, double permeability, double young, double nu) {
  auto mesh = std::make_shared<TriMesh>(build_structured_tri_mesh(nx, ny, 1.0, 1.0));
  const BarryMercerParams bm = barry_mercer_params(young, nu, permeability);
  Scenario s;
  s.name = "barry_mercer";
  s.material = MaterialField::uniform(mesh->num_cells(), young, nu, permeability);
  s.bc.set(Side::Left, side(kFree, kFixed, kDrained));
  s.bc.set(Side::Right, side(kFree, kFixed, kDrained));
  s.bc.set(Side::Bottom, side(kFixed, kFree, kDrained));
  s.bc.set(Side::Top, side(kFixed, kFree, kDrained));
  const int i0 = static_cast<int>(std::lround(bm.x0 / bm.a * nx));
  const int j0 = static_cast<int>(std::lround(bm.y0 / bm.b * ny));
  s.loads.point_sources = {{mesh->grid_vertex(i0, j0), 1.0}};
  s.loads.source_rate = [bm](double t) { return bm.source(t); };
  s.line = horizontal_line(*mesh, j0);
  s.reference_segments = 1;
  s.time_unit = 1.0 / bm.beta;
  s.time = {0.5 * pi / 16.0 * s.time_unit, 16};
  s.recommended_weight = StabWeight::Youngs;
  // A point source needs strong smoothing before the discrete tail stays positive.
  s.recommended_epsilon = 3.0;
  s.mesh = std::move(mesh);
  return s;
}

std::vector<double> sample_line(const SampledLine& line, const Eigen::VectorXd& full_pressure) {
  std::vector<double> out;
  out.reserve(line.vertices.size());
  for (int v : line.vertices) {
    if (v < 0 || v >= full_pressure.size()) throw ShapeError("sampling vertex outside the pressure vector");
    out.push_back(full_pressure[v]);
  }
  return out;
}

}  // namespace biot
