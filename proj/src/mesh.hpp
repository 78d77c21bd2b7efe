#pragma once

#include "nli/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace nli::detail {

inline constexpr std::size_t kMaxMeshCells = 4096;

/// Mesh on [0, upper] with breakpoints at every half period of a phase that
/// grows by `phase_per_unit` radians per unit length, i.e. at every peak and
/// zero of a sin^2 of that phase. Falls back to a uniform mesh of
/// kMaxMeshCells panels when the oscillation is denser than that.
inline std::vector<double> phase_mesh(double upper, double phase_per_unit) {
  const double rate = std::abs(phase_per_unit);
  if (!(rate > 0.0) || !std::isfinite(rate)) return {0.0, upper};
  const double half_period = 0.5 * std::numbers::pi / rate;
  const double cells = upper / half_period;
  if (cells > static_cast<double>(kMaxMeshCells)) {
    return quad::uniform_mesh(0.0, upper, kMaxMeshCells);
  }
  std::vector<double> mesh{0.0};
  for (std::size_t k = 1;; ++k) {
    const double p = static_cast<double>(k) * half_period;
    if (p >= upper * (1.0 - 1e-12)) break;
    mesh.push_back(p);
  }
  mesh.push_back(upper);
  return mesh;
}

}  // namespace nli::detail
