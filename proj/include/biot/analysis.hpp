#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "biot/assembly.hpp"
#include "biot/solver.hpp"

namespace biot {

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MatrixEntry {
  long row = 0;
  long col = 0;
  double value = 0.0;
};

struct MonotonicityReport {
  long positive_offdiag_count = 0;
  std::vector<MatrixEntry> violating_entries;
  std::optional<double> restriction_margin;
  std::optional<long> oscillation_score;
  std::optional<double> max_overshoot;
};

/// Lists off-diagonal entries greater than tol * max |entry|.
MonotonicityReport m_matrix_check(const SparseMatrix& matrix, double tol = 1e-12);

struct RestrictionThreshold {
  double divisor = 4.0;  ///< 4 for P1-P1, 6 for Taylor-Hood
  double tau_min = 0.0;  ///< max_i h_i^2 / (c K_i E_i)
};

/// 1D only; E_i is the 1D modulus lambda + 2 mu.
RestrictionThreshold restriction_threshold(const SimplexMesh& mesh, const MaterialField& material, SchemeKind scheme);
/// Largest uniform h with h^2 <= c E K tau.
double max_uniform_h(double ekt, SchemeKind scheme);
/// Smallest number of uniform divisions of [0, length] meeting the restriction.
int required_divisions(double length, double ekt, SchemeKind scheme);
/// tau_min - tau, snapped to zero within 1e-12 tau; positive means violated.
double restriction_margin(const SimplexMesh& mesh, const MaterialField& material, SchemeKind scheme, double tau);

/// Number of sign changes of successive differences above the noise floor
/// (1e-8 of the profile range) in excess of `reference_segments`, floored at 0.
long oscillation_score(const std::vector<double>& profile, long reference_segments);
/// Largest excursion of the profile outside [lo, hi].
double max_overshoot(const std::vector<double>& profile, double lo, double hi);

struct ElementBracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectralReport {
  std::vector<ElementBracket> elements;
  double global_min = 0.0;
  double global_max = 0.0;
};

/// Generalized eigenvalue extremes of (S_{b,T}, h_T^2 L_T) on 1^perp.
SpectralReport spectral_equivalence_report(const SimplexMesh& mesh, const MaterialField& material);

struct ErrorNorms {
  double l2_pressure = 0.0;
  /// sqrt(||e||^2 + K tau ||grad e||^2)
  double energy_pressure = 0.0;
  std::optional<double> tau_h_norm;
};

using ScalarField = std::function<double(double x, double y)>;

/// Error of a P1 pressure field (full vertex numbering) against an exact
/// function interpolated at P2 accuracy, integrated with a degree-4 rule.
ErrorNorms error_norms(const Eigen::VectorXd& numeric, const ScalarField& exact, const SimplexMesh& mesh,
                       const MaterialField& material, double tau);

/// sqrt(U^T A U + tau P^T Ap P + P^T C P) on reduced vectors.
double tau_h_norm(const BiotSystem& system, const Eigen::VectorXd& u, const Eigen::VectorXd& p, double tau);

/// ||U||_A^2 + ||P||_C^2 on reduced vectors.
double discrete_energy(const BiotSystem& system, const State& s);

nlohmann::json to_json(const MonotonicityReport& r);
nlohmann::json to_json(const ErrorNorms& n);
nlohmann::json to_json(const SpectralReport& r);

}  // namespace biot
