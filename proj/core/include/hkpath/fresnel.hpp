#pragma once

// Quadratic-phase (Fresnel) densities and distributions on cells of R^n,
// in the plain form and in the incremental form used for time slicing.
//
// `sign` selects the phase exp(+i y^2/2) (sign = +1) or its conjugate family
// exp(-i y^2/2) (sign = -1); the normalizer follows as sqrt(-i sign / 2 pi).

#include <complex>
#include <span>
#include <vector>

#include "hkpath/gauge.hpp"

namespace hkpath::fresnel {

using Complex = std::complex<double>;
using gauge::Cell1D;
using gauge::CellND;
using gauge::ExtReal;

/// int_0^u exp(i sign y^2 / 2) dy. Maclaurin series for |u| <= 3; beyond that
/// the complementary error function by continued fraction, or by the
/// asymptotic expansion once its optimally truncated remainder is below 1e-17.
Complex incomplete_fresnel(double u, int sign = +1);

/// int_0^inf exp(i sign y^2 / 2) dy = sqrt(pi/2) exp(i sign pi/4).
Complex fresnel_half_line(int sign = +1);

/// int over a cell of exp(i sign y^2 / 2) dy.
Complex fresnel_cell_integral(const Cell1D& cell, int sign = +1);

/// Principal sqrt(-i sign / (2 pi)).
Complex normalizer(int sign = +1);

/// exp((i/2) |x|^2); unit modulus.
Complex phi_n(std::span<const double> x);

/// Density mass g_n(x)|I|. Finite tags use normalizer^n phi(tag) |I|; if any tag
/// component is infinite every factor switches to its cell integral.
Complex g_n_mass(const CellND& cell);

/// Finite union of pairwise disjoint cells of common dimension.
class FigureND {
 public:
  FigureND() = default;
  /// Throws InvalidArgument on mixed dimensions or overlapping cells.
  explicit FigureND(std::vector<std::vector<Cell1D>> cells);

  const std::vector<std::vector<Cell1D>>& cells() const noexcept { return cells_; }

 private:
  std::vector<std::vector<Cell1D>> cells_;
};

/// G_n of one product cell: prod_j normalizer * int_{I_j} exp(i sign y^2/2) dy.
Complex G_n_cell(std::span<const Cell1D> factors, int sign = +1);

/// Sum of G_n over the cells of a figure; the empty figure has G = 0.
Complex G_n_distribution(const FigureND& figure, int sign = +1);

/// Times t_1 < ... < t_n after origin t_0 = origin_time, path starting at origin_point.
struct IncrementSchedule {
  std::vector<double> times;
  double origin_time = 0.0;
  double origin_point = 0.0;

  /// Throws ScheduleError on empty, non-increasing or negative-origin schedules.
  void validate() const;
  std::vector<double> increments() const;
  static IncrementSchedule uniform(double origin_time, double end_time, int slices, double origin_point = 0.0);
};

/// One incremental factor: sqrt(-i/(2 pi dt)) int_I exp(i (x - anchor)^2 / (2 dt)) dx.
Complex incremental_factor(const Cell1D& cell, double anchor, double dt, int sign = +1);

/// Incremental density mass g^T(x(N))|I[N]|. The finite branch uses the tags as
/// the path values x_j; the integral branch anchors factor j at the previous
/// finite tag (the origin point for j = 1, or after an infinite tag).
Complex incremental_density(std::span<const ExtReal> tags, std::span<const Cell1D> cells,
                            const IncrementSchedule& schedule);

/// Incremental distribution G^T(I[N]). `anchors` holds x_0..x_{n-1}; when empty
/// every factor is anchored at the origin point.
Complex incremental_distribution(std::span<const Cell1D> cells, const IncrementSchedule& schedule,
                                 std::span<const double> anchors = {});

struct FresnelRow {
  double u;
  Complex value;
};

/// Rows (u, int_0^u exp(i y^2/2) dy) for `count` evenly spaced u in [u0, u1].
std::vector<FresnelRow> tabulate_incomplete(double u0, double u1, int count);

}  // namespace hkpath::fresnel
