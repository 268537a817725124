#pragma once

// Cells, tags, gauges and tagged divisions of the extended real line.
//
// Every one-dimensional cell is stored as a half-open interval (lo, hi]
// whose ends may be infinite: (-inf, a], (u, v], (b, +inf) and the full line.
// That makes exact partitions of the line possible and keeps the volume
// formula (product of v - u over bounded factors, zero otherwise) exact.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hkpath::gauge {

using Complex = std::complex<double>;

/// A point of the extended real line.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  /// Accepts finite values and +/-infinity; NaN is rejected.
  ExtReal(double v);  // NOLINT(google-explicit-constructor)

  static ExtReal neg_inf() noexcept;
  static ExtReal pos_inf() noexcept;

  bool is_finite() const noexcept { return v_ > -kInf && v_ < kInf; }
  bool is_neg_inf() const noexcept { return v_ == -kInf; }
  bool is_pos_inf() const noexcept { return v_ == kInf; }

  /// The stored value; +/-infinity for the infinite points.
  double value() const noexcept { return v_; }

  friend bool operator==(ExtReal a, ExtReal b) noexcept { return a.v_ == b.v_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double v_ = 0.0;
};

std::string to_string(ExtReal x);

enum class CellKind { NegTail, Bounded, PosTail, FullLine };

std::string to_string(CellKind kind);

class Cell1D {
 public:
  /// (-inf, a]
  static Cell1D neg_tail(double a);
  /// (u, v], u < v
  static Cell1D bounded(double u, double v);
  /// (b, +inf)
  static Cell1D pos_tail(double b);
  static Cell1D full_line() noexcept;

  CellKind kind() const noexcept { return kind_; }
  /// Left end, -inf for NegTail/FullLine.
  double lo() const noexcept { return lo_; }
  /// Right end, +inf for PosTail/FullLine.
  double hi() const noexcept { return hi_; }

  bool contains(double x) const noexcept { return x > lo_ && x <= hi_; }

  friend bool operator==(const Cell1D& a, const Cell1D& b) noexcept {
    return a.kind_ == b.kind_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  Cell1D(CellKind kind, double lo, double hi) noexcept : kind_(kind), lo_(lo), hi_(hi) {}

  CellKind kind_;
  double lo_;
  double hi_;
};

std::string to_string(const Cell1D& cell);

struct TaggedCell1D {
  ExtReal tag;
  Cell1D cell;
};

/// Positive gauge on the extended reals.
class Gauge1D {
 public:
  using Fn = std::function<double(ExtReal)>;

  explicit Gauge1D(Fn delta);

  static Gauge1D constant(double delta);

  /// Evaluates the gauge; throws InvalidArgument if the value is not positive
  /// and finite.
  double operator()(ExtReal x) const;

 private:
  Fn delta_;
};

struct Division1D {
  std::vector<TaggedCell1D> items;
};

/// A cell of R^n together with its tag.
class CellND {
 public:
  /// Throws AssociationError unless every (tag_j, factor_j) pair is associated.
  CellND(std::vector<Cell1D> factors, std::vector<ExtReal> tag);

  std::size_t dimension() const noexcept { return factors_.size(); }
  const std::vector<Cell1D>& factors() const noexcept { return factors_; }
  const std::vector<ExtReal>& tag() const noexcept { return tag_; }
  bool has_finite_tag() const noexcept;

 private:
  std::vector<Cell1D> factors_;
  std::vector<ExtReal> tag_;
};

double cell_volume(const Cell1D& cell) noexcept;
/// Product of factor volumes; zero as soon as one factor is unbounded.
double cell_volume(const std::vector<Cell1D>& factors) noexcept;

bool tag_is_associated(ExtReal tag, const Cell1D& cell) noexcept;

bool is_delta_fine(const TaggedCell1D& tc, const Gauge1D& g);

struct CousinOptions {
  std::optional<double> left_tail_end;   // forced a
  std::optional<double> right_tail_end;  // forced b
  int max_depth = 60;
};

/// Builds a delta-fine division of the line: two fine tails plus a recursive
/// bisection of the bounded middle. Throws ResourceLimit when a branch needs
/// more than max_depth bisections.
Division1D cousin_division(const Gauge1D& g, const CousinOptions& options = {});

enum class ViolationKind { Overlap, Gap, Association, NotFine, Empty };

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t item;
  std::string detail;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const noexcept;
};

ValidityReport validate_division(const Division1D& d, const std::optional<Gauge1D>& g = std::nullopt);

using PointCellFn = std::function<Complex(ExtReal, const Cell1D&)>;

/// Compensated Riemann sum of h over the division, in item order.
Complex riemann_sum(const PointCellFn& h, const Division1D& d);

}  // namespace hkpath::gauge
