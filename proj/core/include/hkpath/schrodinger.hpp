#pragma once

// Grid reference for i dpsi/dt = -(1/2m) psi'' + V psi: Crank-Nicolson steps
// with zero Dirichlet ends. Used as an oracle, not as a propagator method.

#include <complex>
#include <vector>

#include "hkpath/pathint.hpp"

namespace hkpath::schrodinger {

using Complex = std::complex<double>;

/// values[k] = psi(x0 + k dx).
struct GridWavefunction {
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<Complex> values;

  double x(std::size_t k) const noexcept { return x0 + static_cast<double>(k) * dx; }
};

/// sqrt(dx sum |psi_k|^2).
double l2_norm(const GridWavefunction& psi);

/// sqrt(dx sum |a_k - b_k|^2); grids must match.
double l2_distance(const GridWavefunction& a, const GridWavefunction& b);

/// Evolves from t0 to t0 + tau in steps of at most dt, V sampled at each step's
/// midpoint time. Throws GridTooCoarse when dt > dx^2.
GridWavefunction schrodinger_reference(const pathint::Potential& v, const GridWavefunction& initial, double tau,
                                       double dt, double mass = 1.0, double t0 = 0.0);

}  // namespace hkpath::schrodinger
