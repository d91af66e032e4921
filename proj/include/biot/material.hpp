#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace biot {

class MaterialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Piecewise-constant material coefficients, one entry per cell.
class MaterialField {
 public:
  MaterialField() = default;
  MaterialField(std::vector<double> young, std::vector<double> poisson, std::vector<double> permeability);

  static MaterialField uniform(std::size_t n_cells, double young, double poisson, double permeability);

  std::size_t size() const { return young_.size(); }

  double young(std::size_t c) const { return young_[c]; }
  double poisson(std::size_t c) const { return poisson_[c]; }
  double permeability(std::size_t c) const { return permeability_[c]; }
  double lame_lambda(std::size_t c) const { return lambda_[c]; }
  double lame_mu(std::size_t c) const { return mu_[c]; }
  /// lambda + 2 mu; the 1D stiffness modulus.
  double constrained_modulus(std::size_t c) const { return lambda_[c] + 2.0 * mu_[c]; }

  void set_permeability(std::size_t c, double k);

  static double lambda_from(double young, double poisson);
  static double mu_from(double young, double poisson);

 private:
  void validate_and_derive();

  std::vector<double> young_;
  std::vector<double> poisson_;
  std::vector<double> permeability_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
};

}  // namespace biot
