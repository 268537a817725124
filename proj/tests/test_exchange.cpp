#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hkpath/error.hpp"
#include "hkpath/exchange.hpp"

using namespace hkpath;
using namespace hkpath::exchange;

namespace {

constexpr double kPi = std::numbers::pi;

LabConfig small_lab() {
  LabConfig lab;
  lab.samples = 64;
  return lab;
}

}  // namespace

TEST(Growth, ClosedFormForOneIncrement) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 1);
  const std::vector<double> radii{1, 2, 4, 8, 10, 16, 32, 64};
  const auto t = abs_g0_growth(s, radii);
  ASSERT_EQ(t.rows.size(), radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    EXPECT_NEAR(t.rows[k].sum, 2.0 * radii[k] / std::sqrt(2.0 * kPi), 1e-10);
    if (k > 0) {
      EXPECT_GT(t.rows[k].sum, t.rows[k - 1].sum);
    }
  }
  EXPECT_NEAR(t.rows[0].sum, 0.7978845608028654, 1e-12);
  EXPECT_NEAR(t.rows[4].sum, 10.0 * t.rows[0].sum, 1e-12);
}

TEST(Growth, DoublingDoubles) {
  const auto s = IncrementSchedule::uniform(0.0, 2.5, 1);
  const std::vector<double> radii{3, 6, 12};
  const auto t = abs_g0_growth(s, radii);
  EXPECT_NEAR(t.rows[1].sum, 2.0 * t.rows[0].sum, 1e-12);
  EXPECT_NEAR(t.rows[2].sum, 2.0 * t.rows[1].sum, 1e-12);
}

TEST(Growth, TwoIncrements) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 2);
  const std::vector<double> radii{1, 2};
  const auto t = abs_g0_growth(s, radii, 4);
  const double density = 1.0 / (2.0 * kPi * 0.5);
  EXPECT_NEAR(t.rows[0].sum, 4.0 * density, 1e-12);
  EXPECT_NEAR(t.rows[1].sum, 16.0 * density, 1e-11);
}

TEST(Growth, RadiiMustIncrease) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 1);
  const std::vector<double> bad{1, 1};
  EXPECT_THROW(abs_g0_growth(s, bad), Error);
  const std::vector<double> negative{-1, 2};
  EXPECT_THROW(abs_g0_growth(s, negative), Error);
}

TEST(Probe, AbsG0IsUnboundedGaussianIsBounded) {
  const LabConfig lab;
  for (int n = 1; n <= 3; ++n) {
    const auto s = IncrementSchedule::uniform(0.0, 1.5, n, 0.4);
    EXPECT_EQ(probe_beta(abs_g0(s), s, lab).verdict, BetaVerdict::Unbounded) << "n = " << n;
    const auto g = probe_beta(gaussian_beta(), s, lab);
    EXPECT_EQ(g.verdict, BetaVerdict::Bounded) << "n = " << n;
    EXPECT_NEAR(g.rows.back().integral, std::pow(kPi, n / 2.0), 1e-6);
  }
}

TEST(Probe, GrowthExponentIsTheDimension) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 2);
  const auto p = probe_beta(abs_g0(s), s, LabConfig{});
  EXPECT_NEAR(p.rows.back().exponent, 2.0, 1e-9);
}

TEST(Samples, DeterministicAndAssociated) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 3);
  LabConfig lab = small_lab();
  lab.infinite_fraction = 0.5;
  const auto a = draw_samples(s, lab);
  const auto b = draw_samples(s, lab);
  ASSERT_EQ(a.size(), 64u);
  int infinite = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_TRUE(gauge::tag_is_associated(a[k].tags[j], a[k].cells[j]));
      EXPECT_EQ(a[k].tags[j], b[k].tags[j]);
      EXPECT_EQ(a[k].cells[j], b[k].cells[j]);
      if (!a[k].tags[j].is_finite()) ++infinite;
    }
  }
  EXPECT_GT(infinite, 0);
  EXPECT_LT(infinite, 64);
}

TEST(Diagnostic, PartialSumFamily) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 2);
  const auto v = pathint::Potential::constant(1.0);
  LabConfig lab = small_lab();
  lab.eps = 1e-6;
  const auto w = bounded_convergence_diagnostic(partial_sum_family(s, v), partial_sum_limit(s, v), abs_g0(s), s, lab);
  // Remainder of exp(-i) after m terms: 1/(m+1)! is first below 1e-6 at m = 9.
  EXPECT_EQ(w.m, 9);
  EXPECT_LT(w.max_ratio, 1e-6);
  EXPECT_GE(w.max_ratio, 0.0);
  EXPECT_EQ(w.beta_probe.verdict, BetaVerdict::Unbounded);
}

TEST(Diagnostic, ConstantFamily) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 1);
  const auto h = g0_integrand(s);
  const auto w = bounded_convergence_diagnostic([&](int, const Sample& x) { return h(x); }, h,
                                                [](const Sample&) { return 1.0; }, s, small_lab());
  EXPECT_EQ(w.m, 0);
  EXPECT_EQ(w.max_ratio, 0.0);
}

TEST(Diagnostic, HarmonicFamily) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 2);
  const auto h = g0_integrand(s);
  LabConfig lab = small_lab();
  lab.eps = 0.03;
  const auto family = [&](int m, const Sample& x) { return m == 0 ? h(x) * 1e300 : h(x) * (1.0 + 1.0 / m); };
  const auto w = bounded_convergence_diagnostic(family, h, abs_g0(s), s, lab);
  EXPECT_EQ(w.m, static_cast<int>(std::ceil(1.0 / 0.03)));
  EXPECT_NEAR(w.max_ratio, 1.0 / 34.0, 1e-12);
}

TEST(Diagnostic, NoMFound) {
  const auto s = IncrementSchedule::uniform(0.0, 1.0, 1);
  const auto h = g0_integrand(s);
  LabConfig lab = small_lab();
  lab.m_cap = 5;
  lab.eps = 0.01;
  try {
    bounded_convergence_diagnostic([&](int m, const Sample& x) { return h(x) * (1.0 + 1.0 / (m + 1)); }, h, abs_g0(s),
                                   s, lab);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMFound);
  }
}

TEST(Action, LeftEndpointSums) {
  const IncrementSchedule s{{0.5, 1.5}, 0.0, 2.0};
  Sample x{{gauge::ExtReal(1.0), gauge::ExtReal(3.0)}, {gauge::Cell1D::bounded(0.5, 1.0), gauge::Cell1D::bounded(3.0, 4.0)}};
  const auto v = pathint::Potential::harmonic(1.0);
  EXPECT_DOUBLE_EQ(action_sum(v, s, x), 0.5 * 4.0 * 0.5 + 0.5 * 1.0 * 1.0);
  x.tags[0] = gauge::ExtReal::pos_inf();
  x.cells[0] = gauge::Cell1D::pos_tail(0.0);
  EXPECT_DOUBLE_EQ(action_sum(v, s, x), 0.5 * 4.0 * 0.5 + 0.5 * 4.0 * 1.0);
}

TEST(Experiment, FreeRowsAreIdentical) {
  pathint::PropagatorQuery q;
  q.xi_end = 0.5;
  q.slices = 4;
  const auto r = exchange_experiment(q, 3, small_lab());
  for (const auto& row : r.rows) {
    EXPECT_LE(row.difference, 1e-6 * std::abs(row.sliced));
    EXPECT_EQ(row.partial_sum, r.rows[0].partial_sum);
  }
}

TEST(Experiment, ConstantPotentialDecays) {
  pathint::PropagatorQuery q;
  q.xi_end = 0.3;
  q.slices = 4;
  q.potential = pathint::Potential::constant(1.0);
  const auto r = exchange_experiment(q, 12, small_lab());
  ASSERT_EQ(r.rows.size(), 13u);
  const double psi0 = std::abs(pathint::psi0_closed(q));
  double bound = psi0;
  for (const auto& row : r.rows) {
    bound /= row.m + 1;
    EXPECT_LE(row.difference, bound + 1e-6 * psi0) << "m = " << row.m;
  }
  EXPECT_LE(r.rows.back().difference, 1e-8 + 1e-6 * psi0);
  EXPECT_EQ(r.witness.beta_probe.verdict, BetaVerdict::Unbounded);
}

TEST(Experiment, DifferencesNonincreasingBeyondTwo) {
  for (double c : {-2.0, 0.5, 1.5}) {
    pathint::PropagatorQuery q;
    q.xi_end = -0.2;
    q.slices = 4;
    q.potential = pathint::Potential::constant(c);
    const auto r = exchange_experiment(q, 10, small_lab());
    const double budget = 1e-6 * std::abs(pathint::psi0_closed(q));
    for (std::size_t m = 3; m < r.rows.size(); ++m) {
      EXPECT_LE(r.rows[m].difference, r.rows[m - 1].difference + budget) << "c = " << c << ", m = " << m;
    }
  }
}

TEST(Experiment, HarmonicMonotone) {
  pathint::PropagatorQuery q;
  q.xi_start = 0.1;
  q.xi_end = 0.6;
  q.tau_end = 0.5;
  q.slices = 8;
  q.potential = pathint::Potential::harmonic(0.5);
  const auto r = exchange_experiment(q, 4, small_lab());
  for (std::size_t m = 1; m < r.rows.size(); ++m) EXPECT_LT(r.rows[m].difference, r.rows[m - 1].difference);
}
