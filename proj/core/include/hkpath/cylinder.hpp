#pragma once

// Cylindrical cells of R^T, the gauges gamma = (L, delta), gamma-fineness,
// cylindrical Riemann sums and the reduction of an integral over R^T, for an
// integrand depending on finitely many times, to n dimensions.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/integrator.hpp"

namespace hkpath::cylinder {

using Complex = std::complex<double>;
using gauge::Cell1D;
using gauge::ExtReal;

/// Strictly increasing, nonempty times inside the interval [t_lo, t_hi].
class TimeSet {
 public:
  TimeSet() = default;
  /// Throws InvalidArgument when empty, not increasing, or outside the interval.
  explicit TimeSet(std::vector<double> times, double t_lo = 0.0,
                   double t_hi = std::numeric_limits<double>::infinity());

  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t size() const noexcept { return times_.size(); }
  double t_lo() const noexcept { return t_lo_; }
  double t_hi() const noexcept { return t_hi_; }

  bool contains(double t) const noexcept;
  bool includes(const TimeSet& other) const noexcept;
  /// Union of two time sets of the same interval.
  TimeSet merged(const TimeSet& other) const;

  friend bool operator==(const TimeSet& a, const TimeSet& b) noexcept {
    return a.times_ == b.times_ && a.t_lo_ == b.t_lo_ && a.t_hi_ == b.t_hi_;
  }

 private:
  std::vector<double> times_;
  double t_lo_ = 0.0;
  double t_hi_ = std::numeric_limits<double>::infinity();
};

/// I[N] = I_1 x ... x I_n x R^(T \ N).
class CylinderCell {
 public:
  /// Throws InvalidArgument when the factor count differs from |N|.
  CylinderCell(TimeSet n, std::vector<Cell1D> factors);

  const TimeSet& times() const noexcept { return n_; }
  const std::vector<Cell1D>& factors() const noexcept { return factors_; }

 private:
  TimeSet n_;
  std::vector<Cell1D> factors_;
};

/// x(N) = (x(t_1), ..., x(t_n)).
class PathSample {
 public:
  /// Throws InvalidArgument when the value count differs from |N|.
  PathSample(TimeSet n, std::vector<ExtReal> values);

  const TimeSet& times() const noexcept { return n_; }
  const std::vector<ExtReal>& values() const noexcept { return values_; }
  /// Value at a time of N; throws InvalidArgument otherwise.
  ExtReal at(double t) const;

 private:
  TimeSet n_;
  std::vector<ExtReal> values_;
};

/// gamma = (L, delta): L(x) is a finite time set, delta(x, N) > 0.
struct GaugeRT {
  std::function<TimeSet(const PathSample&)> L;
  std::function<double(const PathSample&, const TimeSet&)> delta;
};

struct CylinderItem {
  PathSample tag;
  CylinderCell cell;
};

struct CylinderDivision {
  std::vector<CylinderItem> items;
};

/// Every value of the tag is associated with the factor at the same time.
bool is_associated(const PathSample& x, const CylinderCell& cell);

/// L(x) within N, and every factor fine for the single gauge value delta(x, N)
/// at its tag. Throws AssociationError when (x, I[N]) is not associated.
bool is_gamma_fine(const PathSample& x, const CylinderCell& cell, const GaugeRT& g);

/// Every item re-expressed on the union of all time sets; missing times get
/// full-line factors tagged at +inf.
std::vector<CylinderItem> refine_to_common_timeset(std::span<const CylinderItem> items);

struct PartitionReport {
  std::size_t association_errors = 0;
  std::size_t gaps = 0;
  std::size_t overlaps = 0;
  std::vector<std::string> messages;

  bool ok() const noexcept { return association_errors == 0 && gaps == 0 && overlaps == 0; }
};

/// Whether the cells of the division partition R^T. Runs on the common time
/// set, over the grid of elementary boxes cut out by all factor ends.
PartitionReport check_partition(const CylinderDivision& d);

using CylinderPointCellFn = std::function<Complex(const PathSample&, const TimeSet&, const CylinderCell&)>;

/// Compensated sum of h over the items. Throws IntegrandError when h throws a
/// foreign exception or returns a non-finite value.
Complex cylinder_riemann_sum(const CylinderPointCellFn& h, const CylinderDivision& d);

/// Damping schedule of the reduction. In the scaled increments
/// z_j = (x_j - x_{j-1}) / sqrt(t_j - t_{j-1}) each kernel is normalized
/// sqrt(-a/pi) exp(a z^2) with a = (i/2) exp(i phi); phi runs over Chebyshev
/// nodes of [phi_lo, phi_hi] and the values are extrapolated to phi = 0.
/// Entries are indexed by n - 1.
struct ReductionConfig {
  std::array<double, 4> phi_lo{0.05, 0.1, 0.4, 0.6};
  std::array<double, 4> phi_hi{0.6, 0.6, 1.2, 1.4};
  std::array<int, 4> nodes{10, 8, 8, 6};
  integrate::IntegratorConfig integrator{.initial_cells = 2};
};

/// Int over R^T of f(x(N)) G^T for f depending on x(N) only, computed as the
/// n-dimensional integral of f against the incremental density. The times of
/// `schedule` are N. Throws DimensionCap, NoConvergence, ScheduleError.
Complex reduce_cylinder_integral(const std::function<Complex(std::span<const double>)>& f, const TimeSet& n,
                                 const fresnel::IncrementSchedule& schedule, double tol,
                                 const ReductionConfig& config = {});

}  // namespace hkpath::cylinder
