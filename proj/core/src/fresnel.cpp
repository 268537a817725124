#include "hkpath/fresnel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::fresnel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSeriesLimit = 3.0;
constexpr double kAsymptoticLimit = 8.0;

void check_sign(int sign) {
  if (sign != 1 && sign != -1) fail(ErrorCode::InvalidArgument, "phase sign must be +1 or -1");
}

/// w with (w y)^2 = -i sign y^2 / 2, so exp(-(w y)^2) = exp(i sign y^2 / 2).
Complex rotation(int sign) {
  return std::polar(1.0 / std::numbers::sqrt2, -sign * std::numbers::pi / 4.0);
}

Complex maclaurin(double u, int sign) {
  const Complex step = Complex(0.0, 0.5 * sign) * (u * u);
  Complex term = u;  // (i sign/2)^k u^(2k+1) / k!
  ComplexCompensatedSum sum;
  for (int k = 0; k < 200; ++k) {
    const Complex contrib = term / (2.0 * k + 1.0);
    sum.add(contrib);
    if (std::abs(contrib) < 1e-18 * std::abs(sum.value())) break;
    term *= step / (k + 1.0);
  }
  return sum.value();
}

/// erfc(z) for Re z > 0 by the continued fraction z + (1/2)/(z + 1/(z + (3/2)/(z + ...))).
Complex erfc_continued_fraction(Complex z) {
  constexpr double tiny = 1e-300;
  Complex f = z;
  Complex c = f;
  Complex d = 0.0;
  for (int k = 1; k < 20000; ++k) {
    const double a = 0.5 * k;
    d = z + a * d;
    if (d == Complex{}) d = tiny;
    c = z + a / c;
    if (c == Complex{}) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-z * z) / (std::sqrt(std::numbers::pi) * f);
}

/// Optimally truncated asymptotic series; empty result when the first omitted
/// term (the remainder bound) is not below 1e-17.
bool erfc_asymptotic(Complex z, Complex& out) {
  const Complex inv = 1.0 / (2.0 * z * z);
  Complex term = 1.0;
  ComplexCompensatedSum sum;
  sum.add(term);
  for (int k = 1; k < 200; ++k) {
    const Complex next = term * (-(2.0 * k - 1.0)) * inv;
    if (std::abs(next) > std::abs(term)) return false;
    if (std::abs(next) < 1e-17) {
      out = std::exp(-z * z) / (z * std::sqrt(std::numbers::pi)) * sum.value();
      return true;
    }
    sum.add(next);
    term = next;
  }
  return false;
}

/// int_b^inf exp(i sign y^2/2) dy, b >= 0.
Complex upper_tail(double b, int sign) {
  if (b <= kSeriesLimit) return fresnel_half_line(sign) - maclaurin(b, sign);
  const Complex z = rotation(sign) * b;
  Complex erfc;
  if (!(b >= kAsymptoticLimit && erfc_asymptotic(z, erfc))) erfc = erfc_continued_fraction(z);
  return fresnel_half_line(sign) * erfc;
}

/// int_b^inf for any finite b.
Complex tail_from(double b, int sign) {
  if (b >= 0.0) return upper_tail(b, sign);
  return fresnel_half_line(sign) + incomplete_fresnel(-b, sign);
}

/// int over (lo, hi] with possibly infinite ends.
Complex integral_between(double lo, double hi, int sign) {
  if (lo == -kInf && hi == kInf) return 2.0 * fresnel_half_line(sign);
  if (hi == kInf) return tail_from(lo, sign);
  if (lo == -kInf) return tail_from(-hi, sign);  // even integrand
  // Difference of tails keeps accuracy when both ends are far out on one side.
  if (lo >= kSeriesLimit) return upper_tail(lo, sign) - upper_tail(hi, sign);
  if (hi <= -kSeriesLimit) return upper_tail(-hi, sign) - upper_tail(-lo, sign);
  return incomplete_fresnel(hi, sign) - incomplete_fresnel(lo, sign);
}

Cell1D shifted_scaled(const Cell1D& cell, double anchor, double scale) {
  using gauge::CellKind;
  switch (cell.kind()) {
    case CellKind::NegTail: return Cell1D::neg_tail((cell.hi() - anchor) / scale);
    case CellKind::PosTail: return Cell1D::pos_tail((cell.lo() - anchor) / scale);
    case CellKind::FullLine: return cell;
    case CellKind::Bounded: break;
  }
  const double u = (cell.lo() - anchor) / scale;
  const double v = (cell.hi() - anchor) / scale;
  if (!(u < v)) fail(ErrorCode::InvalidArgument, "cell collapses under increment scaling");
  return Cell1D::bounded(u, v);
}

bool factors_disjoint(const std::vector<Cell1D>& a, const std::vector<Cell1D>& b) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].hi() <= b[j].lo() || b[j].hi() <= a[j].lo()) return true;
  }
  return false;
}

}  // namespace

Complex fresnel_half_line(int sign) {
  check_sign(sign);
  return std::polar(std::sqrt(std::numbers::pi / 2.0), sign * std::numbers::pi / 4.0);
}

Complex incomplete_fresnel(double u, int sign) {
  check_sign(sign);
  if (std::isnan(u)) fail(ErrorCode::InvalidArgument, "incomplete Fresnel argument is NaN");
  if (std::isinf(u)) return u > 0 ? fresnel_half_line(sign) : -fresnel_half_line(sign);
  const double a = std::abs(u);
  const Complex value = a <= kSeriesLimit ? maclaurin(a, sign) : fresnel_half_line(sign) - upper_tail(a, sign);
  return u < 0 ? -value : value;
}

Complex fresnel_cell_integral(const Cell1D& cell, int sign) {
  check_sign(sign);
  return integral_between(cell.lo(), cell.hi(), sign);
}

Complex normalizer(int sign) {
  check_sign(sign);
  return std::sqrt(Complex(0.0, -sign / (2.0 * std::numbers::pi)));
}

Complex phi_n(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) s += xi * xi;
  return std::polar(1.0, 0.5 * s);
}

Complex g_n_mass(const CellND& cell) {
  const auto n = static_cast<int>(cell.dimension());
  if (cell.has_finite_tag()) {
    std::vector<double> x;
    x.reserve(cell.tag().size());
    for (auto t : cell.tag()) x.push_back(t.value());
    return std::pow(normalizer(), n) * phi_n(x) * gauge::cell_volume(cell.factors());
  }
  return G_n_cell(cell.factors());
}

FigureND::FigureND(std::vector<std::vector<Cell1D>> cells) : cells_(std::move(cells)) {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].empty() || cells_[i].size() != cells_.front().size()) {
      fail(ErrorCode::InvalidArgument, "figure cells must share one positive dimension");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (!factors_disjoint(cells_[i], cells_[k])) {
        fail(ErrorCode::InvalidArgument, "figure cells " + std::to_string(k) + " and " + std::to_string(i) +
                                             " overlap");
      }
    }
  }
}

Complex G_n_cell(std::span<const Cell1D> factors, int sign) {
  Complex product = 1.0;
  const Complex norm = normalizer(sign);
  for (const auto& c : factors) product *= norm * fresnel_cell_integral(c, sign);
  return product;
}

Complex G_n_distribution(const FigureND& figure, int sign) {
  ComplexCompensatedSum sum;
  for (const auto& cell : figure.cells()) sum.add(G_n_cell(cell, sign));
  return sum.value();
}

void IncrementSchedule::validate() const {
  if (times.empty()) fail(ErrorCode::ScheduleError, "schedule has no times");
  if (!(origin_time >= 0.0) || !std::isfinite(origin_time)) {
    fail(ErrorCode::ScheduleError, "origin time must be finite and nonnegative");
  }
  if (!std::isfinite(origin_point)) fail(ErrorCode::ScheduleError, "origin point must be finite");
  double prev = origin_time;
  for (double t : times) {
    if (!std::isfinite(t) || !(t > prev)) fail(ErrorCode::ScheduleError, "schedule times must increase strictly");
    prev = t;
  }
}

std::vector<double> IncrementSchedule::increments() const {
  validate();
  std::vector<double> dt;
  dt.reserve(times.size());
  double prev = origin_time;
  for (double t : times) {
    dt.push_back(t - prev);
    prev = t;
  }
  return dt;
}

IncrementSchedule IncrementSchedule::uniform(double origin_time, double end_time, int slices, double origin_point) {
  if (slices < 1) fail(ErrorCode::ScheduleError, "need at least one slice");
  IncrementSchedule s;
  s.origin_time = origin_time;
  s.origin_point = origin_point;
  for (int j = 1; j <= slices; ++j) {
    s.times.push_back(j == slices ? end_time : origin_time + (end_time - origin_time) * j / slices);
  }
  s.validate();
  return s;
}

Complex incremental_factor(const Cell1D& cell, double anchor, double dt, int sign) {
  if (!(dt > 0.0)) fail(ErrorCode::ScheduleError, "time increment must be positive");
  const double scale = std::sqrt(dt);
  // sqrt(-i/(2 pi dt)) * sqrt(dt) * int over the rescaled cell.
  return normalizer(sign) * fresnel_cell_integral(shifted_scaled(cell, anchor, scale), sign);
}

Complex incremental_density(std::span<const ExtReal> tags, std::span<const Cell1D> cells,
                            const IncrementSchedule& schedule) {
  const auto dt = schedule.increments();
  if (tags.size() != cells.size() || cells.size() != dt.size()) {
    fail(ErrorCode::ScheduleError, "tags, cells and schedule must have the same length");
  }
  bool finite = true;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    if (!gauge::tag_is_associated(tags[j], cells[j])) {
      fail(ErrorCode::AssociationError, "tag " + gauge::to_string(tags[j]) + " not associated to " +
                                            gauge::to_string(cells[j]));
    }
    finite = finite && tags[j].is_finite();
  }

  if (finite) {
    Complex product = 1.0;
    double prev = schedule.origin_point;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double x = tags[j].value();
      const double inc = x - prev;
      product *= normalizer() / std::sqrt(dt[j]) * std::polar(1.0, 0.5 * inc * inc / dt[j]);
      prev = x;
    }
    return product * gauge::cell_volume(std::vector<Cell1D>(cells.begin(), cells.end()));
  }

  Complex product = 1.0;
  double anchor = schedule.origin_point;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    product *= incremental_factor(cells[j], anchor, dt[j]);
    if (tags[j].is_finite()) anchor = tags[j].value();
  }
  return product;
}

Complex incremental_distribution(std::span<const Cell1D> cells, const IncrementSchedule& schedule,
                                 std::span<const double> anchors) {
  const auto dt = schedule.increments();
  if (cells.size() != dt.size()) fail(ErrorCode::ScheduleError, "cells and schedule must have the same length");
  if (!anchors.empty() && anchors.size() != cells.size()) {
    fail(ErrorCode::ScheduleError, "anchors must give x_0..x_{n-1}");
  }
  Complex product = 1.0;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const double anchor = anchors.empty() ? schedule.origin_point : anchors[j];
    product *= incremental_factor(cells[j], anchor, dt[j]);
  }
  return product;
}

std::vector<FresnelRow> tabulate_incomplete(double u0, double u1, int count) {
  if (count < 2 || !(u0 < u1)) fail(ErrorCode::InvalidArgument, "tabulation needs count >= 2 and u0 < u1");
  std::vector<FresnelRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double u = (k + 1 == count) ? u1 : u0 + (u1 - u0) * k / (count - 1);
    rows.push_back({u, incomplete_fresnel(u)});
  }
  return rows;
}

}  // namespace hkpath::fresnel
