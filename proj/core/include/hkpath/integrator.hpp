#pragma once

// Numerical gauge integration on the line and on small boxes of R^n.
//
// A window is covered by a division into cells (u, v]. Each cell carries a
// point-cell value h(x, I) given by a 20-point Gauss-Legendre sum, and the
// Riemann sum over the division is accumulated with compensation. The cell
// whose value disagrees most with the value of its two halves is split until
// the summed disagreement is within tolerance.
//
// When refinement stalls next to one end of the window (an integrand like
// the derivative of x^2 sin(1/x^2) at 0), the end is handled the Henstock way:
// the window is shrunk geometrically toward the bad end, and the last cell is
// tagged at that end. The limit of the shrinking integrals is the integral.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hkpath::integrate {

using Complex = std::complex<double>;
using RealFn = std::function<Complex(double)>;
using VecFn = std::function<Complex(std::span<const double>)>;

struct IntegratorConfig {
  double tol_1d = 1e-8;
  double tol_nd = 1e-6;
  /// Cells examined per 1D adaptive pass before giving up.
  std::size_t max_cells = std::size_t{1} << 18;
  /// Bisection levels below the initial cells.
  int max_depth = 48;
  /// Uniform cells a window starts from.
  int initial_cells = 8;
  std::size_t max_dimension = 4;
  /// Gaussian damping exp(-eps x^2), eps_k = damping_start * 2^-k, k = 0..damping_levels.
  double damping_start = 1e-2;
  int damping_levels = 8;
  /// Try the shrinking-window treatment of a stalled end before failing.
  bool endpoint_limit = true;
  int endpoint_max_halvings = 30;
};

struct IntegrationReport {
  Complex value{};
  double abs_error_estimate = 0.0;
  std::size_t refinements = 0;
  bool converged = false;
};

/// Adaptive gauge integral of f over (lo, hi]. Throws NoConvergence when the
/// refinement cap is hit and IntegrandError when f throws or is not finite.
IntegrationReport hk_integrate_1d(const RealFn& f, double lo, double hi, double tol,
                                  const IntegratorConfig& config = {});

/// Iterated adaptive integral over the box prod_j (lo_j, hi_j], n <= max_dimension.
IntegrationReport hk_integrate_nd(const VecFn& f, std::span<const double> lo, std::span<const double> hi,
                                  double tol, const IntegratorConfig& config = {});

/// The quadratic-phase tail  int exp(c x^2 / 2) dx  over (lower, +inf) when
/// direction = +1, or over (-inf, lower] when direction = -1.
struct OscillatoryTailSpec {
  Complex phase_quadratic_coefficient;
  double lower_limit = 0.0;
  int direction = +1;

  /// Throws InvalidArgument unless Re c <= 0, c != 0, Im c >= 0 when Re c = 0.
  void validate() const;
};

/// Gaussian-damped evaluation of the tail plus polynomial extrapolation of the
/// damping parameter to zero. Throws NoConvergence when the extrapolants from
/// the last two schedule points differ by more than tol.
Complex oscillatory_improper(const OscillatoryTailSpec& spec, double tol, const IntegratorConfig& config = {});

/// int over R of exp(c x^2 / 2): an undamped core (-core, core] plus two damped tails.
Complex oscillatory_full_line(Complex c, double tol, const IntegratorConfig& config = {},
                              double core_half_width = 4.0);

/// sup over grid points x of |int_lo^x f|, prefix integrals accumulated cell by cell.
double alexiewicz_seminorm(const RealFn& f, double lo, double hi, int grid,
                           const IntegratorConfig& config = {});

/// Neville extrapolation of samples (x_k, y_k) to x = 0.
Complex extrapolate_to_zero(std::span<const double> x, std::span<const Complex> y);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace hkpath::integrate
