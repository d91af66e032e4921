#include "biot/material.hpp"

#include <string>

namespace biot {

MaterialField::MaterialField(std::vector<double> young, std::vector<double> poisson, std::vector<double> permeability)
    : young_(std::move(young)), poisson_(std::move(poisson)), permeability_(std::move(permeability)) {
  validate_and_derive();
}

MaterialField MaterialField::uniform(std::size_t n_cells, double young, double poisson, double permeability) {
  return MaterialField(std::vector<double>(n_cells, young), std::vector<double>(n_cells, poisson),
                       std::vector<double>(n_cells, permeability));
}

double MaterialField::lambda_from(double young, double poisson) {
  return young * poisson / ((1.0 - 2.0 * poisson) * (1.0 + poisson));
}

double MaterialField::mu_from(double young, double poisson) { return young / (2.0 * (1.0 + poisson)); }

void MaterialField::set_permeability(std::size_t c, double k) {
  if (!(k >= 0.0)) throw MaterialError("permeability must be non-negative");
  permeability_.at(c) = k;
}

void MaterialField::validate_and_derive() {
  const std::size_t n = young_.size();
  if (poisson_.size() != n || permeability_.size() != n) {
    throw MaterialError("material arrays differ in length");
  }
  lambda_.resize(n);
  mu_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    if (!(young_[c] > 0.0)) throw MaterialError("Young's modulus must be positive on cell " + std::to_string(c));
    if (!(poisson_[c] >= 0.0 && poisson_[c] < 0.5)) {
      throw MaterialError("Poisson ratio must lie in [0, 0.5) on cell " + std::to_string(c));
    }
    if (!(permeability_[c] >= 0.0)) throw MaterialError("permeability must be non-negative on cell " + std::to_string(c));
    lambda_[c] = lambda_from(young_[c], poisson_[c]);
    mu_[c] = mu_from(young_[c], poisson_[c]);
  }
}

}  // namespace biot
