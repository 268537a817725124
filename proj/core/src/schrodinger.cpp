#include "hkpath/schrodinger.hpp"

#include <cmath>
#include <string>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::schrodinger {

double l2_norm(const GridWavefunction& psi) {
  CompensatedSum acc;
  for (const auto& v : psi.values) acc.add(std::norm(v));
  return std::sqrt(psi.dx * acc.value());
}

double l2_distance(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.values.size() != b.values.size() || a.dx != b.dx || a.x0 != b.x0) {
    fail(ErrorCode::InvalidArgument, "wavefunctions live on different grids");
  }
  CompensatedSum acc;
  for (std::size_t k = 0; k < a.values.size(); ++k) acc.add(std::norm(a.values[k] - b.values[k]));
  return std::sqrt(a.dx * acc.value());
}

GridWavefunction schrodinger_reference(const pathint::Potential& v, const GridWavefunction& initial, double tau,
                                       double dt, double mass, double t0) {
  const std::size_t n = initial.values.size();
  if (n < 3) fail(ErrorCode::InvalidArgument, "grid needs at least three points");
  if (!(initial.dx > 0.0) || !(tau > 0.0) || !(dt > 0.0) || !(mass > 0.0)) {
    fail(ErrorCode::InvalidArgument, "dx, tau, dt and mass must be positive");
  }
  if (dt > initial.dx * initial.dx) {
    fail(ErrorCode::GridTooCoarse, "time step " + std::to_string(dt) + " exceeds dx^2 = " +
                                       std::to_string(initial.dx * initial.dx));
  }
  const auto steps = static_cast<long>(std::ceil(tau / dt - 1e-12));
  const double h = tau / static_cast<double>(steps);

  // (1 + i h H / 2) psi' = (1 - i h H / 2) psi, H = -(1/2m) D2 + V.
  const double kin = 1.0 / (2.0 * mass * initial.dx * initial.dx);
  const Complex off(0.0, -0.5 * h * kin);  // the sub/super diagonal of 1 + i h H / 2
  GridWavefunction psi = initial;
  std::vector<Complex> diag(n);
  std::vector<Complex> rhs(n);
  std::vector<Complex> c_prime(n);
  std::vector<double> pot(n);
  for (long s = 0; s < steps; ++s) {
    const double t_mid = t0 + (static_cast<double>(s) + 0.5) * h;
    for (std::size_t k = 0; k < n; ++k) pot[k] = v(psi.x(k), t_mid);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex hpsi_diag = (2.0 * kin + pot[k]) * psi.values[k];
      Complex hpsi = hpsi_diag;
      if (k > 0) hpsi -= kin * psi.values[k - 1];
      if (k + 1 < n) hpsi -= kin * psi.values[k + 1];
      rhs[k] = psi.values[k] - Complex(0.0, 0.5 * h) * hpsi;
      diag[k] = 1.0 + Complex(0.0, 0.5 * h) * (2.0 * kin + pot[k]);
    }
    // Thomas elimination with constant off-diagonals.
    c_prime[0] = off / diag[0];
    rhs[0] /= diag[0];
    for (std::size_t k = 1; k < n; ++k) {
      const Complex denom = diag[k] - off * c_prime[k - 1];
      c_prime[k] = off / denom;
      rhs[k] = (rhs[k] - off * rhs[k - 1]) / denom;
    }
    psi.values[n - 1] = rhs[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) psi.values[k] = rhs[k] - c_prime[k] * psi.values[k + 1];
  }
  return psi;
}

}  // namespace hkpath::schrodinger
