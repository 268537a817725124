#include "hkpath/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <utility>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::gauge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

}  // namespace

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v)) fail(ErrorCode::InvalidArgument, "extended real cannot be NaN");
}

ExtReal ExtReal::neg_inf() noexcept {
  ExtReal x;
  x.v_ = -kInf;
  return x;
}

ExtReal ExtReal::pos_inf() noexcept {
  ExtReal x;
  x.v_ = kInf;
  return x;
}

std::string to_string(ExtReal x) {
  if (x.is_neg_inf()) return "-inf";
  if (x.is_pos_inf()) return "+inf";
  return fmt_double(x.value());
}

std::string to_string(CellKind kind) {
  switch (kind) {
    case CellKind::NegTail: return "neg_tail";
    case CellKind::Bounded: return "bounded";
    case CellKind::PosTail: return "pos_tail";
    case CellKind::FullLine: return "full_line";
  }
  return "unknown";
}

Cell1D Cell1D::neg_tail(double a) {
  if (!std::isfinite(a)) fail(ErrorCode::InvalidArgument, "tail bound must be finite");
  return {CellKind::NegTail, -kInf, a};
}

Cell1D Cell1D::bounded(double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v)) {
    fail(ErrorCode::InvalidArgument, "bounded cell ends must be finite");
  }
  if (!(u < v)) fail(ErrorCode::InvalidArgument, "bounded cell requires u < v");
  return {CellKind::Bounded, u, v};
}

Cell1D Cell1D::pos_tail(double b) {
  if (!std::isfinite(b)) fail(ErrorCode::InvalidArgument, "tail bound must be finite");
  return {CellKind::PosTail, b, kInf};
}

Cell1D Cell1D::full_line() noexcept { return {CellKind::FullLine, -kInf, kInf}; }

std::string to_string(const Cell1D& cell) {
  switch (cell.kind()) {
    case CellKind::NegTail: return "(-inf, " + fmt_double(cell.hi()) + "]";
    case CellKind::Bounded: return "(" + fmt_double(cell.lo()) + ", " + fmt_double(cell.hi()) + "]";
    case CellKind::PosTail: return "(" + fmt_double(cell.lo()) + ", +inf)";
    case CellKind::FullLine: return "(-inf, +inf)";
  }
  return "?";
}

Gauge1D::Gauge1D(Fn delta) : delta_(std::move(delta)) {
  if (!delta_) fail(ErrorCode::InvalidArgument, "gauge function is empty");
}

Gauge1D Gauge1D::constant(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::InvalidArgument, "constant gauge must be positive");
  }
  return Gauge1D([delta](ExtReal) { return delta; });
}

double Gauge1D::operator()(ExtReal x) const {
  const double d = delta_(x);
  if (!(d > 0.0) || !std::isfinite(d)) {
    fail(ErrorCode::InvalidArgument, "gauge value at " + to_string(x) + " is not positive");
  }
  return d;
}

CellND::CellND(std::vector<Cell1D> factors, std::vector<ExtReal> tag)
    : factors_(std::move(factors)), tag_(std::move(tag)) {
  if (factors_.empty()) fail(ErrorCode::InvalidArgument, "cell dimension must be at least 1");
  if (factors_.size() != tag_.size()) {
    fail(ErrorCode::AssociationError, "tag and cell dimensions differ");
  }
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    if (!tag_is_associated(tag_[j], factors_[j])) {
      fail(ErrorCode::AssociationError,
           "tag " + to_string(tag_[j]) + " not associated to " + to_string(factors_[j]));
    }
  }
}

bool CellND::has_finite_tag() const noexcept {
  return std::all_of(tag_.begin(), tag_.end(), [](ExtReal x) { return x.is_finite(); });
}

double cell_volume(const Cell1D& cell) noexcept {
  return cell.kind() == CellKind::Bounded ? cell.hi() - cell.lo() : 0.0;
}

double cell_volume(const std::vector<Cell1D>& factors) noexcept {
  double v = 1.0;
  for (const auto& c : factors) v *= cell_volume(c);
  return v;
}

bool tag_is_associated(ExtReal tag, const Cell1D& cell) noexcept {
  switch (cell.kind()) {
    case CellKind::NegTail: return tag.is_neg_inf();
    case CellKind::Bounded:
      return tag.is_finite() && (tag.value() == cell.lo() || tag.value() == cell.hi());
    case CellKind::PosTail: return tag.is_pos_inf();
    case CellKind::FullLine: return !tag.is_finite();
  }
  return false;
}

bool is_delta_fine(const TaggedCell1D& tc, const Gauge1D& g) {
  const Cell1D& c = tc.cell;
  switch (c.kind()) {
    case CellKind::Bounded: return c.hi() - c.lo() < g(tc.tag);
    case CellKind::NegTail: return c.hi() < -1.0 / g(ExtReal::neg_inf());
    case CellKind::PosTail: return c.lo() > 1.0 / g(ExtReal::pos_inf());
    case CellKind::FullLine: return true;
  }
  return false;
}

Division1D cousin_division(const Gauge1D& g, const CousinOptions& options) {
  const double left_limit = -1.0 / g(ExtReal::neg_inf());
  const double right_limit = 1.0 / g(ExtReal::pos_inf());
  const double a = options.left_tail_end.value_or(left_limit - 1.0);
  const double b = options.right_tail_end.value_or(right_limit + 1.0);
  if (!(a < left_limit)) {
    fail(ErrorCode::InvalidArgument, "left tail end " + fmt_double(a) + " is not gauge-fine");
  }
  if (!(b > right_limit)) {
    fail(ErrorCode::InvalidArgument, "right tail end " + fmt_double(b) + " is not gauge-fine");
  }
  if (!(a < b)) fail(ErrorCode::InvalidArgument, "tail ends must satisfy a < b");

  Division1D d;
  d.items.push_back({ExtReal::neg_inf(), Cell1D::neg_tail(a)});

  struct Pending {
    double u;
    double v;
    int depth;
  };
  std::vector<Pending> stack{{a, b, 0}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    const double width = p.v - p.u;
    if (width < g(p.u)) {
      d.items.push_back({p.u, Cell1D::bounded(p.u, p.v)});
      continue;
    }
    if (width < g(p.v)) {
      d.items.push_back({p.v, Cell1D::bounded(p.u, p.v)});
      continue;
    }
    const double mid = p.u + 0.5 * width;
    if (p.depth >= options.max_depth || !(mid > p.u && mid < p.v)) {
      fail(ErrorCode::ResourceLimit, "bisection depth exceeded near " + fmt_double(p.u) +
                                         "; gauge too small for float resolution");
    }
    stack.push_back({mid, p.v, p.depth + 1});
    stack.push_back({p.u, mid, p.depth + 1});
  }

  d.items.push_back({ExtReal::pos_inf(), Cell1D::pos_tail(b)});
  return d;
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::Gap: return "gap";
    case ViolationKind::Association: return "association";
    case ViolationKind::NotFine: return "not_fine";
    case ViolationKind::Empty: return "empty";
  }
  return "unknown";
}

std::size_t ValidityReport::count(ViolationKind kind) const noexcept {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [kind](const Violation& v) { return v.kind == kind; }));
}

ValidityReport validate_division(const Division1D& d, const std::optional<Gauge1D>& g) {
  ValidityReport report;
  const auto& items = d.items;
  if (items.empty()) {
    report.violations.push_back({ViolationKind::Empty, 0, "division has no cells"});
    return report;
  }

  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (!tag_is_associated(it.tag, it.cell)) {
      report.violations.push_back({ViolationKind::Association, i,
                                   "tag " + to_string(it.tag) + " not associated to " + to_string(it.cell)});
    }
    if (it.cell.kind() == CellKind::FullLine && items.size() > 1) {
      report.violations.push_back({ViolationKind::Overlap, i, "full line cell inside a larger division"});
    }
    if (g && !is_delta_fine(it, *g)) {
      report.violations.push_back({ViolationKind::NotFine, i, to_string(it.cell) + " is not gauge-fine"});
    }
  }

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return items[x].cell.lo() < items[y].cell.lo();
  });

  const auto& first = items[order.front()].cell;
  if (first.lo() != -kInf) {
    report.violations.push_back({ViolationKind::Gap, order.front(),
                                 "nothing covers (-inf, " + fmt_double(first.lo()) + "]"});
  }
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const auto& cur = items[order[k]].cell;
    const auto& next = items[order[k + 1]].cell;
    if (cur.hi() < next.lo()) {
      report.violations.push_back({ViolationKind::Gap, order[k + 1],
                                   "gap (" + fmt_double(cur.hi()) + ", " + fmt_double(next.lo()) + "]"});
    } else if (cur.hi() > next.lo()) {
      report.violations.push_back({ViolationKind::Overlap, order[k + 1],
                                   to_string(cur) + " overlaps " + to_string(next)});
    }
  }
  const auto& last = items[order.back()].cell;
  if (last.hi() != kInf) {
    report.violations.push_back({ViolationKind::Gap, order.back(),
                                 "nothing covers (" + fmt_double(last.hi()) + ", +inf)"});
  }
  return report;
}

Complex riemann_sum(const PointCellFn& h, const Division1D& d) {
  ComplexCompensatedSum acc;
  for (const auto& it : d.items) {
    Complex term;
    try {
      term = h(it.tag, it.cell);
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorCode::IntegrandError, e.what());
    }
    if (!std::isfinite(term.real()) || !std::isfinite(term.imag())) {
      fail(ErrorCode::IntegrandError, "non-finite integrand value on " + to_string(it.cell));
    }
    acc.add(term);
  }
  return acc.value();
}

}  // namespace hkpath::gauge
