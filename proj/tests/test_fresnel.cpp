#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hkpath/error.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/integrator.hpp"

using namespace hkpath;
using namespace hkpath::fresnel;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

struct Frozen {
  double u;
  double re;
  double im;
};

// int_0^u exp(i y^2 / 2) dy, mpmath at 30 digits.
const Frozen kIncomplete[] = {
    {0.5, 0.49921931493660256, 0.020810093401773634}, {2.0, 1.3351936962943366, 0.9976237113254213},
    {3.0, 0.57648924917175973, 0.98635161075101878},  {3.5, 0.82068657502446941, 0.61224042940072454},
    {5.0, 0.86521623015695022, 0.68809709023376708},  {8.0, 0.95348173298545514, 0.78095162348088562},
    {12.0, 0.9079351651197251, 0.96667271665828769},  {40.0, 0.90858314241889231, 0.89741613196072934},
    {-2.5, -0.9440639147551199, -1.2654277868457022},
};

}  // namespace

TEST(IncompleteFresnel, MatchesHighPrecisionValues) {
  for (const auto& f : kIncomplete) {
    const Complex v = incomplete_fresnel(f.u);
    EXPECT_NEAR(v.real(), f.re, 1e-14) << "u = " << f.u;
    EXPECT_NEAR(v.imag(), f.im, 1e-14) << "u = " << f.u;
  }
}

TEST(IncompleteFresnel, ConjugateFamily) {
  for (const auto& f : kIncomplete) {
    const Complex v = incomplete_fresnel(f.u, -1);
    EXPECT_NEAR(v.real(), f.re, 1e-14);
    EXPECT_NEAR(v.imag(), -f.im, 1e-14);
  }
}

TEST(IncompleteFresnel, SwitchoverAgreesWithQuadrature) {
  for (double u : {2.9, 3.0, 3.1, 7.9, 8.1}) {
    const auto r = integrate::hk_integrate_1d([](double y) { return std::polar(1.0, 0.5 * y * y); }, 0.0, u, 1e-12);
    EXPECT_LE(std::abs(r.value - incomplete_fresnel(u)), 1e-11) << "u = " << u;
  }
}

TEST(IncompleteFresnel, ApproachesHalfLine) {
  EXPECT_LE(std::abs(incomplete_fresnel(1e4) - fresnel_half_line()), 1e-4);
  EXPECT_NEAR(fresnel_half_line().real(), std::sqrt(kPi / 2.0) * std::cos(kPi / 4.0), 1e-15);
}

TEST(Normalizer, PrincipalRoot) {
  const Complex n = normalizer();
  EXPECT_GT(n.real(), 0.0);
  EXPECT_LE(std::abs(n * n - (-kI / (2.0 * kPi))), 1e-16);
}

TEST(Phi, Examples) {
  const double zero[] = {0.0, 0.0};
  EXPECT_EQ(phi_n(zero), Complex(1.0));
  const double root_pi[] = {std::sqrt(kPi), std::sqrt(kPi)};
  EXPECT_LE(std::abs(phi_n(root_pi) + 1.0), 1e-14);
  const double any[] = {0.3, -7.1, 2.2};
  EXPECT_NEAR(std::abs(phi_n(any)), 1.0, 1e-15);
}

TEST(GnMass, FiniteBranch) {
  const CellND c({Cell1D::bounded(0.0, 1e-6)}, {ExtReal(0.0)});
  EXPECT_LE(std::abs(g_n_mass(c) - normalizer() * 1e-6), 1e-22);
}

TEST(GnMass, FiniteBranchModulus) {
  const CellND c({Cell1D::bounded(0.4, 0.9), Cell1D::bounded(-2.0, -1.0)}, {ExtReal(0.9), ExtReal(-2.0)});
  EXPECT_NEAR(std::abs(g_n_mass(c)), 0.5 / (2.0 * kPi), 1e-15);
}

TEST(GnMass, InfiniteTagTail) {
  const CellND c({Cell1D::pos_tail(1.3)}, {ExtReal::pos_inf()});
  const Complex v = g_n_mass(c);
  EXPECT_NEAR(v.real(), 0.060466509376387546, 1e-14);
  EXPECT_NEAR(v.imag(), 0.24324598521942231, 1e-14);
  const CellND half({Cell1D::pos_tail(0.0)}, {ExtReal::pos_inf()});
  EXPECT_LE(std::abs(g_n_mass(half) - 0.5), 1e-15);
}

TEST(GnMass, MixedTagsUseCellIntegrals) {
  const CellND c({Cell1D::bounded(0.0, 1.0), Cell1D::pos_tail(0.0)}, {ExtReal(0.0), ExtReal::pos_inf()});
  const Complex want = normalizer() * incomplete_fresnel(1.0) * 0.5;
  EXPECT_LE(std::abs(g_n_mass(c) - want), 1e-15);
}

TEST(CellND, RejectsUnassociatedTags) {
  try {
    CellND({Cell1D::bounded(0.0, 1.0)}, {ExtReal(0.5)});
    FAIL() << "expected AssociationError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AssociationError);
  }
}

TEST(Distribution, FullSpace) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::vector<Cell1D> full(n, Cell1D::full_line());
    EXPECT_LE(std::abs(G_n_cell(full) - 1.0), 1e-14);
  }
  const FigureND fig({{Cell1D::full_line(), Cell1D::full_line()}});
  EXPECT_LE(std::abs(G_n_distribution(fig) - 1.0), 1e-14);
}

TEST(Distribution, HalvesSumToOne) {
  const FigureND fig({{Cell1D::neg_tail(0.0)}, {Cell1D::pos_tail(0.0)}});
  EXPECT_LE(std::abs(G_n_distribution(fig) - 1.0), 1e-15);
}

TEST(Distribution, EmptyFigure) { EXPECT_EQ(G_n_distribution(FigureND{}), Complex(0.0)); }

TEST(Distribution, FigureRejectsOverlap) {
  EXPECT_THROW(FigureND({{Cell1D::bounded(0, 2)}, {Cell1D::bounded(1, 3)}}), Error);
  EXPECT_THROW(FigureND({{Cell1D::bounded(0, 2)}, {Cell1D::bounded(3, 4), Cell1D::full_line()}}), Error);
}

TEST(Distribution, FinitelyAdditiveOnRandomSplits) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    const double w = a + (b - a) * 0.37;
    const double c = u(rng);
    const Cell1D y = Cell1D::pos_tail(c);
    const Complex whole = G_n_cell(std::vector<Cell1D>{Cell1D::bounded(a, b), y});
    const FigureND split({{Cell1D::bounded(a, w), y}, {Cell1D::bounded(w, b), y}});
    EXPECT_LE(std::abs(G_n_distribution(split) - whole), 1e-10);
  }
}

TEST(Distribution, ConjugateFamily) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 20; ++k) {
    double a = u(rng);
    double b = u(rng);
    if (a > b) std::swap(a, b);
    const std::vector<Cell1D> cell{Cell1D::bounded(a, b)};
    EXPECT_LE(std::abs(std::conj(G_n_cell(cell)) - G_n_cell(cell, -1)), 1e-15);
  }
}

TEST(Incremental, ZeroIncrement) {
  const IncrementSchedule s{{1.0}, 0.0, 0.0};
  const double h = 0.01;
  const ExtReal tags[] = {ExtReal(0.0)};
  const Cell1D cells[] = {Cell1D::bounded(0.0, h)};
  EXPECT_LE(std::abs(incremental_density(tags, cells, s) - normalizer() * h), 1e-17);
}

TEST(Incremental, ModulusIsIndependentOfTags) {
  const IncrementSchedule s{{0.5, 1.25, 2.0}, 0.0, 0.4};
  const ExtReal tags[] = {ExtReal(1.0), ExtReal(-3.0), ExtReal(7.5)};
  const Cell1D cells[] = {Cell1D::bounded(0.5, 1.0), Cell1D::bounded(-3.0, -2.8), Cell1D::bounded(7.5, 9.5)};
  const double want = 0.5 * 0.2 * 2.0 / std::sqrt(8.0 * kPi * kPi * kPi * 0.5 * 0.75 * 0.75);
  EXPECT_NEAR(std::abs(incremental_density(tags, cells, s)), want, 1e-15);
}

TEST(Incremental, ChangeOfVariablesToGn) {
  const IncrementSchedule s{{0.3, 1.1}, 0.0, 0.25};
  const double x1 = 0.9;
  const double x2 = -0.4;
  const ExtReal tags[] = {ExtReal(x1), ExtReal(x2)};
  const Cell1D cells[] = {Cell1D::bounded(0.8, x1), Cell1D::bounded(x2, -0.1)};
  const double y[] = {(x1 - 0.25) / std::sqrt(0.3), (x2 - x1) / std::sqrt(0.8)};
  const Complex want = normalizer() * normalizer() * phi_n(y) * (0.1 * 0.3) / std::sqrt(0.3 * 0.8);
  EXPECT_LE(std::abs(incremental_density(tags, cells, s) - want), 1e-15);
}

TEST(Incremental, FullCellsForAnySchedule) {
  const IncrementSchedule s{{0.2, 0.9, 1.0, 2.5, 4.0}, 0.1, -1.0};
  const std::vector<Cell1D> full(5, Cell1D::full_line());
  EXPECT_LE(std::abs(incremental_distribution(full, s) - 1.0), 1e-14);
}

TEST(Incremental, SplitAtAnchorSumsToOne) {
  const IncrementSchedule s{{0.7}, 0.0, 0.3};
  const Cell1D left[] = {Cell1D::neg_tail(0.3)};
  const Cell1D right[] = {Cell1D::pos_tail(0.3)};
  EXPECT_LE(std::abs(incremental_distribution(left, s) + incremental_distribution(right, s) - 1.0), 1e-15);
}

TEST(Incremental, NegativeTailOracle) {
  const IncrementSchedule s{{0.5}, 0.0, 0.0};
  const Cell1D cells[] = {Cell1D::neg_tail(0.7)};
  const double anchors[] = {0.2};
  const Complex v = incremental_distribution(cells, s, anchors);
  EXPECT_NEAR(v.real(), 0.7147765821250838, 1e-14);
  EXPECT_NEAR(v.imag(), -0.1816795132949208, 1e-14);
}

TEST(Incremental, ScalingInvariance) {
  const double lambda = 3.7;
  const IncrementSchedule s{{0.4}, 0.0, 0.0};
  const IncrementSchedule scaled{{0.4 * lambda}, 0.0, 0.0};
  const Cell1D cells[] = {Cell1D::bounded(-0.3, 1.1)};
  const double r = std::sqrt(lambda);
  const Cell1D scaled_cells[] = {Cell1D::bounded(-0.3 * r, 1.1 * r)};
  EXPECT_LE(std::abs(incremental_distribution(cells, s) - incremental_distribution(scaled_cells, scaled)), 1e-14);
}

TEST(Incremental, ScheduleValidation) {
  EXPECT_THROW((IncrementSchedule{{}, 0.0, 0.0}).validate(), Error);
  EXPECT_THROW((IncrementSchedule{{1.0, 1.0}, 0.0, 0.0}).validate(), Error);
  EXPECT_THROW((IncrementSchedule{{0.5}, 0.5, 0.0}).validate(), Error);
  EXPECT_THROW((IncrementSchedule{{0.5}, -1.0, 0.0}).validate(), Error);
}

TEST(Tabulate, Rows) {
  const auto rows = tabulate_incomplete(0.0, 2.0, 5);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].u, 0.0);
  EXPECT_EQ(rows[0].value, Complex(0.0));
  EXPECT_EQ(rows[4].u, 2.0);
  EXPECT_NEAR(rows[4].value.real(), 1.3351936962943366, 2e-15);
}
