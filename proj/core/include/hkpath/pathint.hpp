#pragma once

// Propagators of i dpsi/dt = -(1/2m) psi'' + V psi on the line (hbar = 1):
// the free closed form, time-sliced kernels with a potential, the
// perturbation terms psi_r and their partial sums, and the Mehler oracle.
//
// Time slicing works on a uniform grid. Each one-step kernel is the damped
// Gaussian-Fresnel kernel sqrt(-a/pi) exp(a y^2), a = (i m / 2 dt) e^{i phi},
// and the slices are chained by FFT convolutions. Values computed at several
// damping angles phi are extrapolated to phi = 0.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hkpath::pathint {

using Complex = std::complex<double>;

class Potential {
 public:
  enum class Kind { Zero, Constant, Harmonic, Custom };
  using Fn = std::function<double(double x, double t)>;

  static Potential zero();
  static Potential constant(double c);
  /// V(x) = omega^2 x^2 / 2.
  static Potential harmonic(double omega);
  static Potential custom(Fn fn);

  Kind kind() const noexcept { return kind_; }
  /// c for Constant, omega for Harmonic, 0 otherwise.
  double parameter() const noexcept { return parameter_; }
  /// Throws IntegrandError when V is not finite at a finite point.
  double operator()(double x, double t) const;

 private:
  Potential(Kind kind, double parameter, Fn fn) : kind_(kind), parameter_(parameter), fn_(std::move(fn)) {}

  Kind kind_ = Kind::Zero;
  double parameter_ = 0.0;
  Fn fn_;
};

struct PropagatorQuery {
  double xi_start = 0.0;
  double tau_start = 0.0;
  double xi_end = 0.0;
  double tau_end = 1.0;
  int slices = 1;
  Potential potential = Potential::zero();
  /// Optional intermediate times t_1 < ... < t_{n-1}; uniform when empty.
  std::vector<double> slice_times;

  /// Throws ScheduleError or InvalidArgument.
  void validate() const;
  /// t_0 = tau_start, ..., t_n = tau_end.
  std::vector<double> times() const;
};

enum class Sampling {
  /// exp(-i V(x_{j-1}, t_{j-1}) dt_j), the left endpoint of every slice.
  Left,
  /// Half of each slice weight at either end; for convergence experiments.
  Symmetric,
};

/// Grid of `points` nodes spaced 2 extent / points, centred between the two
/// end points; `damping` is the angle phi of the kernels.
struct SliceGrid {
  double extent = 0.0;
  int points = 0;
  double damping = 0.0;
};

struct PathintConfig {
  double mass = 1.0;
  /// Chebyshev damping angles in [phi_lo, phi_hi].
  double phi_lo = 0.05;
  double phi_hi = 0.6;
  int nodes = 10;
  /// Mass neglected outside the grid and aliased above its band, as exp(-tail).
  double tail = 36.0;
  Sampling sampling = Sampling::Left;
  /// Extrapolated values from all nodes and without the farthest one must
  /// agree to rel_tol |psi0|.
  double rel_tol = 1e-6;
  int max_points = 1 << 22;
};

/// (m / (2 pi i T))^{1/2} exp(i m (xi - xi')^2 / (2 T)), principal root.
Complex psi0_closed(const PropagatorQuery& q, double mass = 1.0);

/// Harmonic-oscillator kernel for V = omega^2 x^2 / 2 (m = 1), omega T < pi.
Complex mehler_kernel(const PropagatorQuery& q, double omega);

/// Smallest grid that resolves the kernels and the potential weights at
/// damping angle phi. Throws ResourceLimit beyond max_points.
SliceGrid auto_grid(const PropagatorQuery& q, double phi, const PathintConfig& config = {});

/// The sliced kernel at a single damping angle on a given grid. Throws
/// GridTooCoarse when the grid is smaller or coarser than auto_grid's.
Complex psi_sliced_at(const PropagatorQuery& q, const SliceGrid& grid, const PathintConfig& config = {});

/// Sliced kernel with the configured potential sampling (left endpoints by default),
/// extrapolated to zero damping. n = 1 needs no grid.
Complex psi_sliced(const PropagatorQuery& q, const PathintConfig& config = {});

/// psi_sliced with V = 0.
Complex psi0_sliced(const PropagatorQuery& q, const PathintConfig& config = {});

/// psi_0 ... psi_m: the coefficients of lambda^r in the sliced kernel of the
/// potential lambda V. Between interaction times the path propagates freely;
/// the time integrals are the slice sums. psi_0 is psi0_closed.
std::vector<Complex> psi_terms(int m, const PropagatorQuery& q, const PathintConfig& config = {});

Complex psi_r(int r, const PropagatorQuery& q, const PathintConfig& config = {});

/// sum_{r <= m} psi_r.
Complex perturbation_partial_sum(int m, const PropagatorQuery& q, const PathintConfig& config = {});

/// For n <= 2 only: the intermediate integral computed as a gauge integral
/// over R^T through the cylinder reduction, not on a grid.
Complex psi_sliced_raw(const PropagatorQuery& q, double tol, const PathintConfig& config = {});

struct KernelRow {
  double xi;
  Complex value;
};

/// psi_sliced at every end point in `xis`.
std::vector<KernelRow> kernel_table(const PropagatorQuery& q, std::span<const double> xis,
                                    const PathintConfig& config = {});

}  // namespace hkpath::pathint
