#include <gtest/gtest.h>

#include <cmath>

#include "hkpath/error.hpp"
#include "hkpath/gauge.hpp"

using namespace hkpath;
using namespace hkpath::gauge;

namespace {

std::size_t count_kind(const ValidityReport& r, ViolationKind k) { return r.count(k); }

}  // namespace

TEST(Cell, Volume) {
  EXPECT_EQ(cell_volume(Cell1D::bounded(0, 1)), 1.0);
  EXPECT_EQ(cell_volume(Cell1D::pos_tail(3)), 0.0);
  EXPECT_EQ(cell_volume(Cell1D::bounded(-2, 0.5)), 2.5);
  EXPECT_EQ(cell_volume(Cell1D::full_line()), 0.0);
  EXPECT_EQ(cell_volume(std::vector<Cell1D>{Cell1D::bounded(0, 2), Cell1D::bounded(1, 4)}), 6.0);
  EXPECT_EQ(cell_volume(std::vector<Cell1D>{Cell1D::bounded(0, 2), Cell1D::neg_tail(1)}), 0.0);
}

TEST(Cell, RejectsDegenerateBounds) {
  EXPECT_THROW(Cell1D::bounded(1, 1), Error);
  EXPECT_THROW(Cell1D::bounded(2, 1), Error);
  EXPECT_THROW(Cell1D::bounded(0, INFINITY), Error);
  EXPECT_THROW(Cell1D::pos_tail(NAN), Error);
  EXPECT_THROW(ExtReal(NAN), Error);
}

TEST(Cell, HalfOpenMembership) {
  const auto c = Cell1D::bounded(0, 1);
  EXPECT_FALSE(c.contains(0.0));
  EXPECT_TRUE(c.contains(1.0));
  EXPECT_TRUE(Cell1D::neg_tail(2).contains(2.0));
  EXPECT_FALSE(Cell1D::pos_tail(2).contains(2.0));
}

TEST(Association, Endpoints) {
  EXPECT_TRUE(tag_is_associated(1.0, Cell1D::bounded(0, 1)));
  EXPECT_TRUE(tag_is_associated(0.0, Cell1D::bounded(0, 1)));
  EXPECT_FALSE(tag_is_associated(0.5, Cell1D::bounded(0, 1)));
  EXPECT_TRUE(tag_is_associated(ExtReal::pos_inf(), Cell1D::pos_tail(7)));
  EXPECT_FALSE(tag_is_associated(7.0, Cell1D::pos_tail(7)));
  EXPECT_TRUE(tag_is_associated(ExtReal::neg_inf(), Cell1D::neg_tail(-3)));
  EXPECT_FALSE(tag_is_associated(ExtReal::pos_inf(), Cell1D::neg_tail(-3)));
}

TEST(Fineness, Examples) {
  EXPECT_TRUE(is_delta_fine({0.0, Cell1D::bounded(0, 0.2)}, Gauge1D::constant(0.3)));
  EXPECT_FALSE(is_delta_fine({ExtReal::pos_inf(), Cell1D::pos_tail(5)}, Gauge1D::constant(0.1)));
  EXPECT_TRUE(is_delta_fine({ExtReal::neg_inf(), Cell1D::neg_tail(-20)}, Gauge1D::constant(0.1)));
  EXPECT_TRUE(is_delta_fine({ExtReal::pos_inf(), Cell1D::full_line()}, Gauge1D::constant(0.1)));
}

TEST(Gauge, RejectsNonPositiveValues) {
  const Gauge1D g([](ExtReal x) { return x.is_finite() ? x.value() : 1.0; });
  EXPECT_THROW(g(-1.0), Error);
  EXPECT_THROW(g(0.0), Error);
  EXPECT_DOUBLE_EQ(g(2.0), 2.0);
}

TEST(Cousin, ConstantGaugeForcedTails) {
  const auto g = Gauge1D::constant(0.3);
  CousinOptions opts;
  opts.left_tail_end = -4.0;
  opts.right_tail_end = 4.0;
  const auto d = cousin_division(g, opts);
  EXPECT_TRUE(validate_division(d, g).ok());
  EXPECT_EQ(d.items.front().cell, Cell1D::neg_tail(-4.0));
  EXPECT_EQ(d.items.back().cell, Cell1D::pos_tail(4.0));
  for (std::size_t i = 1; i + 1 < d.items.size(); ++i) {
    const auto& it = d.items[i];
    EXPECT_LT(it.cell.hi() - it.cell.lo(), 0.3);
    EXPECT_TRUE(it.tag.value() == it.cell.lo() || it.tag.value() == it.cell.hi());
  }
}

TEST(Cousin, ShrinkingGaugeNearZero) {
  const Gauge1D g([](ExtReal x) { return x.is_finite() ? std::max(std::abs(x.value()) / 2.0, 0.01) : 1.0; });
  const auto d = cousin_division(g);
  EXPECT_TRUE(validate_division(d, g).ok());
  for (const auto& it : d.items) {
    if (it.cell.kind() == CellKind::Bounded && it.cell.contains(0.0)) {
      EXPECT_LT(it.cell.hi() - it.cell.lo(), 0.01);
    }
  }
}

TEST(Cousin, UnitGauge) {
  const auto g = Gauge1D::constant(1.0);
  const auto d = cousin_division(g);
  EXPECT_TRUE(validate_division(d, g).ok());
  EXPECT_GE(d.items.size(), 4u);
}

TEST(Cousin, PrefersLeftTag) {
  const auto d = cousin_division(Gauge1D::constant(0.5));
  for (std::size_t i = 1; i + 1 < d.items.size(); ++i) EXPECT_EQ(d.items[i].tag.value(), d.items[i].cell.lo());
}

TEST(Cousin, RejectsTailEndsThatAreNotFine) {
  CousinOptions opts;
  opts.left_tail_end = -1.0;
  EXPECT_THROW(cousin_division(Gauge1D::constant(0.1), opts), Error);
}

TEST(Validate, DetectsGap) {
  Division1D d;
  d.items = {{ExtReal::neg_inf(), Cell1D::neg_tail(0)}, {ExtReal::pos_inf(), Cell1D::pos_tail(1)}};
  const auto r = validate_division(d);
  EXPECT_EQ(count_kind(r, ViolationKind::Gap), 1u);
  EXPECT_EQ(r.violations.size(), 1u);
}

TEST(Validate, DetectsInteriorTag) {
  Division1D d;
  d.items = {{ExtReal::neg_inf(), Cell1D::neg_tail(0)},
             {0.5, Cell1D::bounded(0, 1)},
             {ExtReal::pos_inf(), Cell1D::pos_tail(1)}};
  const auto r = validate_division(d);
  EXPECT_EQ(count_kind(r, ViolationKind::Association), 1u);
  EXPECT_EQ(r.violations.size(), 1u);
}

TEST(Validate, DetectsOverlap) {
  Division1D d;
  d.items = {{ExtReal::neg_inf(), Cell1D::neg_tail(1)},
             {0.0, Cell1D::bounded(0, 2)},
             {ExtReal::pos_inf(), Cell1D::pos_tail(2)}};
  EXPECT_GE(count_kind(validate_division(d), ViolationKind::Overlap), 1u);
}

TEST(Validate, EmptyDivision) {
  EXPECT_EQ(count_kind(validate_division(Division1D{}), ViolationKind::Empty), 1u);
}

TEST(Validate, FullLineAlone) {
  Division1D d;
  d.items = {{ExtReal::pos_inf(), Cell1D::full_line()}};
  EXPECT_TRUE(validate_division(d, Gauge1D::constant(0.01)).ok());
}

TEST(Validate, NotFine) {
  const auto d = cousin_division(Gauge1D::constant(1.0));
  EXPECT_GT(count_kind(validate_division(d, Gauge1D::constant(0.01)), ViolationKind::NotFine), 0u);
}

TEST(RiemannSum, VolumeOverTailsAtFour) {
  CousinOptions opts;
  opts.left_tail_end = -4.0;
  opts.right_tail_end = 4.0;
  const auto d = cousin_division(Gauge1D::constant(0.37), opts);
  const Complex s = riemann_sum([](ExtReal, const Cell1D& c) { return Complex(cell_volume(c)); }, d);
  EXPECT_NEAR(s.real(), 8.0, 1e-13);
}

TEST(RiemannSum, OddSymmetry) {
  Division1D d;
  d.items = {{ExtReal::neg_inf(), Cell1D::neg_tail(-2)},
             {-2.0, Cell1D::bounded(-2, -1)},
             {-1.0, Cell1D::bounded(-1, 0)},
             {1.0, Cell1D::bounded(0, 1)},
             {2.0, Cell1D::bounded(1, 2)},
             {ExtReal::pos_inf(), Cell1D::pos_tail(2)}};
  ASSERT_TRUE(validate_division(d).ok());
  const Complex s = riemann_sum(
      [](ExtReal x, const Cell1D& c) { return Complex(x.is_finite() ? x.value() * cell_volume(c) : 0.0); }, d);
  EXPECT_EQ(s, Complex(0.0));
}

TEST(RiemannSum, CountsPositiveInfinityTags) {
  const auto d = cousin_division(Gauge1D::constant(0.4));
  const Complex s = riemann_sum([](ExtReal x, const Cell1D&) { return Complex(x.is_pos_inf() ? 1.0 : 0.0); }, d);
  EXPECT_EQ(s.real(), 1.0);
}

TEST(RiemannSum, InvariantUnderRefinement) {
  CousinOptions opts;
  opts.left_tail_end = -100.0;
  opts.right_tail_end = 100.0;
  const auto h = [](ExtReal, const Cell1D& c) { return Complex(cell_volume(c)); };
  const auto coarse = riemann_sum(h, cousin_division(Gauge1D::constant(1.1), opts));
  const auto fine = riemann_sum(h, cousin_division(Gauge1D::constant(0.013), opts));
  EXPECT_NEAR(coarse.real(), fine.real(), 1e-12);
}
