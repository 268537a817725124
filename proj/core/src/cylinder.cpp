#include "hkpath/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::cylinder {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string times_string(const TimeSet& n) {
  std::ostringstream os;
  os.precision(12);
  os << '{';
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? ", " : "") << n.times()[i];
  os << '}';
  return os.str();
}

std::size_t index_of(const TimeSet& n, double t) {
  const auto& ts = n.times();
  const auto it = std::lower_bound(ts.begin(), ts.end(), t);
  if (it == ts.end() || *it != t) fail(ErrorCode::InvalidArgument, "time not in the time set");
  return static_cast<std::size_t>(it - ts.begin());
}

}  // namespace

TimeSet::TimeSet(std::vector<double> times, double t_lo, double t_hi)
    : times_(std::move(times)), t_lo_(t_lo), t_hi_(t_hi) {
  if (times_.empty()) fail(ErrorCode::InvalidArgument, "time set must be nonempty");
  if (std::isnan(t_lo_) || std::isnan(t_hi_) || !(t_lo_ <= t_hi_)) {
    fail(ErrorCode::InvalidArgument, "time interval must satisfy t_lo <= t_hi");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    const double t = times_[i];
    if (!std::isfinite(t) || t < t_lo_ || t > t_hi_) {
      fail(ErrorCode::InvalidArgument, "time outside the interval T");
    }
    if (i > 0 && !(t > times_[i - 1])) fail(ErrorCode::InvalidArgument, "times must increase strictly");
  }
}

bool TimeSet::contains(double t) const noexcept { return std::binary_search(times_.begin(), times_.end(), t); }

bool TimeSet::includes(const TimeSet& other) const noexcept {
  return std::includes(times_.begin(), times_.end(), other.times_.begin(), other.times_.end());
}

TimeSet TimeSet::merged(const TimeSet& other) const {
  if (t_lo_ != other.t_lo_ || t_hi_ != other.t_hi_) {
    fail(ErrorCode::InvalidArgument, "time sets belong to different intervals");
  }
  std::vector<double> out;
  std::set_union(times_.begin(), times_.end(), other.times_.begin(), other.times_.end(), std::back_inserter(out));
  return TimeSet(std::move(out), t_lo_, t_hi_);
}

CylinderCell::CylinderCell(TimeSet n, std::vector<Cell1D> factors) : n_(std::move(n)), factors_(std::move(factors)) {
  if (factors_.size() != n_.size()) fail(ErrorCode::InvalidArgument, "cell needs one factor per time");
}

PathSample::PathSample(TimeSet n, std::vector<ExtReal> values) : n_(std::move(n)), values_(std::move(values)) {
  if (values_.size() != n_.size()) fail(ErrorCode::InvalidArgument, "path sample needs one value per time");
}

ExtReal PathSample::at(double t) const { return values_[index_of(n_, t)]; }

bool is_associated(const PathSample& x, const CylinderCell& cell) {
  const auto& ts = cell.times().times();
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (!x.times().contains(ts[j])) return false;
    if (!gauge::tag_is_associated(x.at(ts[j]), cell.factors()[j])) return false;
  }
  return true;
}

bool is_gamma_fine(const PathSample& x, const CylinderCell& cell, const GaugeRT& g) {
  if (!is_associated(x, cell)) fail(ErrorCode::AssociationError, "path sample not associated to the cell");
  if (!g.L || !g.delta) fail(ErrorCode::InvalidArgument, "gauge mappings are empty");
  const TimeSet& n = cell.times();
  if (!n.includes(g.L(x))) return false;
  // One delta(x, N) serves every factor of the cell.
  const double d = g.delta(x, n);
  const gauge::Gauge1D one = gauge::Gauge1D::constant(d);
  const auto& ts = n.times();
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (!gauge::is_delta_fine({x.at(ts[j]), cell.factors()[j]}, one)) return false;
  }
  return true;
}

std::vector<CylinderItem> refine_to_common_timeset(std::span<const CylinderItem> items) {
  if (items.empty()) return {};
  TimeSet common = items.front().cell.times();
  for (const auto& it : items) common = common.merged(it.cell.times());

  std::vector<CylinderItem> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    std::vector<Cell1D> factors;
    std::vector<ExtReal> values;
    for (double t : common.times()) {
      if (it.cell.times().contains(t)) {
        factors.push_back(it.cell.factors()[index_of(it.cell.times(), t)]);
        values.push_back(it.tag.times().contains(t) ? it.tag.at(t) : ExtReal::pos_inf());
      } else {
        factors.push_back(Cell1D::full_line());
        values.push_back(ExtReal::pos_inf());
      }
    }
    out.push_back({PathSample(common, values), CylinderCell(common, std::move(factors))});
  }
  return out;
}

PartitionReport check_partition(const CylinderDivision& d) {
  PartitionReport report;
  if (d.items.empty()) {
    report.gaps = 1;
    report.messages.emplace_back("division has no cells");
    return report;
  }
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    if (!is_associated(d.items[i].tag, d.items[i].cell)) {
      ++report.association_errors;
      report.messages.push_back("item " + std::to_string(i) + " is not associated");
    }
  }

  const auto refined = refine_to_common_timeset(d.items);
  const std::size_t n = refined.front().cell.times().size();

  // Cut points per coordinate; the elementary intervals between consecutive
  // cuts, with the infinite ends, tile the line.
  std::vector<std::vector<double>> cuts(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double>& c = cuts[j];
    c.push_back(-kInf);
    c.push_back(kInf);
    for (const auto& it : refined) {
      c.push_back(it.cell.factors()[j].lo());
      c.push_back(it.cell.factors()[j].hi());
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }

  // Each elementary box is represented by an interior point of every factor.
  std::vector<std::size_t> index(n, 0);
  const auto sample = [&](std::size_t j) {
    const double lo = cuts[j][index[j]];
    const double hi = cuts[j][index[j] + 1];
    if (lo == -kInf && hi == kInf) return 0.0;
    if (lo == -kInf) return hi;
    if (hi == kInf) return lo + 1.0;
    return hi;
  };
  std::vector<double> point(n);
  while (true) {
    for (std::size_t j = 0; j < n; ++j) point[j] = sample(j);
    std::size_t covering = 0;
    for (const auto& it : refined) {
      bool inside = true;
      for (std::size_t j = 0; j < n && inside; ++j) inside = it.cell.factors()[j].contains(point[j]);
      covering += inside ? 1 : 0;
    }
    if (covering != 1) {
      std::ostringstream os;
      os.precision(12);
      os << (covering == 0 ? "uncovered" : "multiply covered") << " box at (";
      for (std::size_t j = 0; j < n; ++j) os << (j ? ", " : "") << point[j];
      os << ") on N = " << times_string(refined.front().cell.times());
      report.messages.push_back(os.str());
      (covering == 0 ? report.gaps : report.overlaps) += 1;
    }
    std::size_t j = 0;
    while (j < n && ++index[j] + 1 >= cuts[j].size()) index[j++] = 0;
    if (j == n) break;
  }
  return report;
}

Complex cylinder_riemann_sum(const CylinderPointCellFn& h, const CylinderDivision& d) {
  ComplexCompensatedSum acc;
  for (const auto& it : d.items) {
    Complex term;
    try {
      term = h(it.tag, it.cell.times(), it.cell);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorCode::IntegrandError, e.what());
    }
    if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
      fail(ErrorCode::IntegrandError, "non-finite cylinder integrand value");
    }
    acc.add(term);
  }
  return acc.value();
}

Complex reduce_cylinder_integral(const std::function<Complex(std::span<const double>)>& f, const TimeSet& n,
                                 const fresnel::IncrementSchedule& schedule, double tol,
                                 const ReductionConfig& config) {
  const auto dt = schedule.increments();
  if (n.times() != schedule.times) fail(ErrorCode::ScheduleError, "schedule times must equal N");
  if (!(tol > 0.0) || !std::isfinite(tol)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  const std::size_t dim = dt.size();
  if (dim > config.integrator.max_dimension || dim > config.nodes.size()) {
    fail(ErrorCode::DimensionCap, "dimension " + std::to_string(dim) + " exceeds the reduction cap");
  }
  const double phi_lo = config.phi_lo[dim - 1];
  const double phi_hi = config.phi_hi[dim - 1];
  const int m = config.nodes[dim - 1];
  if (!(phi_lo > 0.0) || !(phi_lo < phi_hi) || !(phi_hi < std::numbers::pi / 2) || m < 2) {
    fail(ErrorCode::InvalidArgument, "damping nodes need 0 < phi_lo < phi_hi < pi/2 and at least two nodes");
  }

  std::vector<double> phis(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    phis[static_cast<std::size_t>(k)] =
        0.5 * (phi_lo + phi_hi) + 0.5 * (phi_hi - phi_lo) * std::cos(std::numbers::pi * (k + 0.5) / m);
  }
  // Extrapolation to 0 magnifies level errors by the Lebesgue constant there.
  double lebesgue = 0.0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < phis.size(); ++j) {
      if (j != i) w *= phis[j] / (phis[j] - phis[i]);
    }
    lebesgue += std::abs(w);
  }
  const double level_tol = tol / (4.0 * lebesgue);
  // Normalized kernels lose at most exp(-tail) of their mass outside the box.
  const double tail = std::log(1.0 / level_tol) + 5.0;

  std::vector<double> root_dt(dim);
  for (std::size_t j = 0; j < dim; ++j) root_dt[j] = std::sqrt(dt[j]);
  std::vector<Complex> values;
  std::vector<double> x(dim);
  for (double phi : phis) {
    const Complex alpha = Complex(0.0, 0.5) * std::polar(1.0, phi);
    const Complex norm = std::pow(std::sqrt(-alpha / std::numbers::pi), static_cast<double>(dim));
    const double half_width = std::sqrt(tail / -alpha.real());
    std::vector<double> lo(dim, -half_width);
    std::vector<double> hi(dim, half_width);
    auto integrand = [&](std::span<const double> z) {
      double prev = schedule.origin_point;
      double quad = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        prev += root_dt[j] * z[j];
        x[j] = prev;
        quad += z[j] * z[j];
      }
      return f(std::span<const double>(x)) * (norm * std::exp(alpha * quad));
    };
    values.push_back(integrate::hk_integrate_nd(integrand, lo, hi, level_tol, config.integrator).value);
  }

  // Nodes are ordered from phi_hi down; dropping the farthest one gives the
  // comparison estimate.
  const Complex all = integrate::extrapolate_to_zero(phis, values);
  const Complex reduced = integrate::extrapolate_to_zero(std::span<const double>(phis).subspan(1),
                                                         std::span<const Complex>(values).subspan(1));
  if (std::abs(all - reduced) > tol) {
    fail(ErrorCode::NoConvergence, "reduction extrapolation unstable: estimates differ by " +
                                       std::to_string(std::abs(all - reduced)));
  }
  return all;
}

}  // namespace hkpath::cylinder
