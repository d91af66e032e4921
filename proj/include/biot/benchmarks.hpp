#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "biot/assembly.hpp"
#include "biot/solver.hpp"

namespace biot {

/// Pressure of the drained-top consolidation column with p0 = |sigma0|.
/// `modulus` is the 1D stiffness (E when nu = 0).
double terzaghi_analytic(double x, double t, double modulus, double permeability, double height, double sigma0);

/// Positive roots of tan(a) = k a with k = (1 - nu)/(nu_u - nu) > 1.
/// Root n lies in ((n-1) pi, (n-1) pi + pi/2).
std::vector<double> mandel_roots(double nu, double nu_u, int count);

struct MandelParams {
  double a = 1.0;
  double b = 1.0;
  double force = 1.0;
  double skempton = 1.0;
  double nu = 0.0;
  double nu_u = 0.5;
  double consolidation = 0.0;  ///< c = K (lambda + 2 mu)
  double p0 = 0.0;
  std::vector<double> roots;

  static MandelParams make(double a, double b, double force, double young, double nu, double permeability, int n_roots = 4000);
};

/// Series solution for the pore pressure; terms are summed until their
/// magnitude bound falls below 1e-14 p0 or `n_terms` is reached.
double mandel_analytic(double x, double t, const MandelParams& params, int n_terms = 1 << 30);

struct BarryMercerParams {
  double a = 1.0;
  double b = 1.0;
  double x0 = 0.25;
  double y0 = 0.25;
  double beta = 0.0;  ///< (lambda + 2 mu) K / (a b)
  double amplitude() const { return 2.0 * beta; }
  double source(double t) const;
};

/// Vertices along a sampling line, ordered by `coordinate`.
struct SampledLine {
  std::vector<int> vertices;
  std::vector<double> coordinate;
  std::string description;
};

/// Grid line x = x_i of a structured triangulation, ordered by y.
SampledLine vertical_line(const TriMesh& mesh, int i);
/// Grid line y = y_j, ordered by x.
SampledLine horizontal_line(const TriMesh& mesh, int j);
SampledLine whole_interval(const IntervalMesh& mesh);

struct Scenario {
  std::string name;
  std::shared_ptr<const SimplexMesh> mesh;
  MaterialField material;
  BoundarySpec bc;
  LoadSchedule loads;
  SampledLine line;
  /// Sign changes of the difference sequence expected of the true profile.
  long reference_segments = 0;
  /// Exact pressure p(x, y, t) when available.
  std::function<double(double, double, double)> analytic;
  TimeParams time;
  StabWeight recommended_weight = StabWeight::Plain;
  /// Tuned 2D stabilization parameter; empty means the scheme default.
  std::optional<double> recommended_epsilon;
  /// Copies of the computational domain that make up the physical one.
  int symmetry_copies = 1;
  /// Physical range of the pressure for overshoot measurement.
  std::optional<std::pair<double, double>> bounds;
  /// Physical time per user-facing time unit.
  double time_unit = 1.0;
  std::vector<std::string> warnings;
};

Scenario build_terzaghi_scenario(int n, double height = 1.0, double young = 1.0, double permeability = 1.0, double sigma0 = -1.0,
                                 double tau = 1e-6);

/// dim 1 gives the column reduction (coordinate is depth below the top).
Scenario build_layered_scenario(int n, int dim = 2);

Scenario build_mandel_scenario(int nx, int ny, double young = 1e4, double nu = 0.0, double permeability = 1e-6, double force = 1.0);

Scenario build_barry_mercer_scenario(int nx, int ny, double permeability = 1e-2, double young = 1e5, double nu = 0.1);
BarryMercerParams barry_mercer_params(double young, double nu, double permeability);

std::vector<double> sample_line(const SampledLine& line, const Eigen::VectorXd& full_pressure);

}  // namespace biot
