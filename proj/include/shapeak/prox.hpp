#pragma once

#include <array>
#include <vector>

#include "shapeak/spf.hpp"

namespace shapeak {

// Result of the 1-d box-restricted prox: argmin over [0,1] of
// (x-z)^2/(2*tau) + spf(x). At regime boundaries the argmin is a 2-element
// set; `chosen` is fixed by a deterministic tie rule (smaller spf value,
// then closer to 0).
struct ProxResult1D {
  std::array<double, 2> minimizers{};
  int count = 1;
  double chosen = 0.0;
  double objective_value = 0.0;
};

ProxResult1D prox_1d(const SpfSpec& spec, double z, double tau);

// Elementwise prox with the shared tie rule.
std::vector<double> prox_vector(const SpfSpec& spec, const std::vector<double>& z,
                                double tau);

}  // namespace shapeak
