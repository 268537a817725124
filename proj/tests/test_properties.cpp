#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hkpath/cylinder.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/serialize.hpp"

using namespace hkpath;
using gauge::Cell1D;
using gauge::ExtReal;
using gauge::Gauge1D;

namespace {

using Complex = std::complex<double>;

constexpr std::uint64_t kSeed = 20240601;

// Either a step function with random breakpoints or c (floor + |x|).
Gauge1D random_gauge(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double at_infinity = 0.2 + 2.0 * u(rng);
  if (u(rng) < 0.5) {
    std::vector<double> breaks;
    std::vector<double> values;
    const int pieces = 1 + static_cast<int>(u(rng) * 6);
    for (int k = 0; k < pieces; ++k) {
      breaks.push_back(-5.0 + 10.0 * u(rng));
      values.push_back(0.05 + u(rng));
    }
    std::sort(breaks.begin(), breaks.end());
    values.push_back(0.05 + u(rng));
    return Gauge1D([=](ExtReal x) {
      if (!x.is_finite()) return at_infinity;
      const auto k = std::upper_bound(breaks.begin(), breaks.end(), x.value()) - breaks.begin();
      return values[static_cast<std::size_t>(k)];
    });
  }
  const double c = 0.05 + 0.5 * u(rng);
  const double floor = 0.05 + u(rng);
  return Gauge1D([=](ExtReal x) { return x.is_finite() ? c * (floor + std::abs(x.value())) : at_infinity; });
}

// a0 + a1 x + a2 cos(a3 x)
struct Smooth {
  double a[4];
  Complex operator()(double x) const { return a[0] + a[1] * x + a[2] * std::cos(a[3] * x); }
  Complex exact(double lo, double hi) const {
    return a[0] * (hi - lo) + a[1] * (hi * hi - lo * lo) / 2.0 + a[2] * (std::sin(a[3] * hi) - std::sin(a[3] * lo)) / a[3];
  }
};

Smooth random_smooth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  return {{u(rng), u(rng), u(rng), 0.5 + std::abs(u(rng)) * 3.0}};
}

}  // namespace

TEST(Properties, RandomGaugesGiveValidDivisions) {
  std::mt19937_64 rng(kSeed);
  for (int k = 0; k < 500; ++k) {
    const Gauge1D g = random_gauge(rng);
    const auto d = gauge::cousin_division(g);
    const auto report = gauge::validate_division(d, g);
    ASSERT_TRUE(report.ok()) << "gauge " << k << ": " << report.violations.front().detail;
    const auto back = serialize::division_from_json(serialize::division_to_json(d));
    ASSERT_EQ(back.items.size(), d.items.size());
    for (std::size_t j = 0; j < d.items.size(); ++j) {
      ASSERT_EQ(back.items[j].tag, d.items[j].tag);
      ASSERT_EQ(back.items[j].cell, d.items[j].cell);
    }
    EXPECT_TRUE(gauge::validate_division(back, g).ok());
  }
}

TEST(Properties, BoundedVolumesAddUp) {
  std::mt19937_64 rng(kSeed + 1);
  for (int k = 0; k < 100; ++k) {
    const auto d = gauge::cousin_division(random_gauge(rng));
    double lo = INFINITY;
    double hi = -INFINITY;
    double total = 0.0;
    for (const auto& it : d.items) {
      if (it.cell.kind() != gauge::CellKind::Bounded) continue;
      lo = std::min(lo, it.cell.lo());
      hi = std::max(hi, it.cell.hi());
      total += gauge::cell_volume(it.cell);
    }
    EXPECT_NEAR(total, hi - lo, 1e-12 * (1.0 + hi - lo));
  }
}

TEST(Properties, IntegralIsLinearConjugateAndAdditive) {
  std::mt19937_64 rng(kSeed + 2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double tol = 1e-9;
  for (int k = 0; k < 200; ++k) {
    const Smooth f = random_smooth(rng);
    const Smooth g = random_smooth(rng);
    double lo = u(rng);
    double hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    hi += 0.1;
    const Complex a(u(rng), u(rng));
    const Complex b(u(rng), u(rng));
    const double mid = lo + (hi - lo) * (0.5 + u(rng) / 7.0);

    const Complex i_f = integrate::hk_integrate_1d(f, lo, hi, tol).value;
    const Complex i_g = integrate::hk_integrate_1d(g, lo, hi, tol).value;
    const Complex i_ab = integrate::hk_integrate_1d([&](double x) { return a * f(x) + b * g(x); }, lo, hi, tol).value;
    const Complex i_conj =
        integrate::hk_integrate_1d([&](double x) { return std::conj(a * f(x)); }, lo, hi, tol).value;
    const Complex left = integrate::hk_integrate_1d(f, lo, mid, tol).value;
    const Complex right = integrate::hk_integrate_1d(f, mid, hi, tol).value;

    const double scale = 1.0 + std::abs(i_f) + std::abs(i_g);
    EXPECT_LE(std::abs(i_f - f.exact(lo, hi)), 10 * tol * scale);
    EXPECT_LE(std::abs(i_ab - (a * i_f + b * i_g)), 10 * tol * scale * (std::abs(a) + std::abs(b)));
    EXPECT_LE(std::abs(i_conj - std::conj(a * i_f)), 10 * tol * scale * std::abs(a));
    EXPECT_LE(std::abs(left + right - i_f), 10 * tol * scale);
  }
}

TEST(Properties, FresnelMassIsAdditive) {
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int k = 0; k < 200; ++k) {
    double p[3] = {u(rng), u(rng), u(rng)};
    std::sort(p, p + 3);
    const Complex whole = fresnel::fresnel_cell_integral(Cell1D::bounded(p[0], p[2]));
    const Complex parts =
        fresnel::fresnel_cell_integral(Cell1D::bounded(p[0], p[1])) + fresnel::fresnel_cell_integral(Cell1D::bounded(p[1], p[2]));
    EXPECT_LE(std::abs(whole - parts), 1e-12);
    const Complex line = fresnel::fresnel_cell_integral(Cell1D::neg_tail(p[1])) + fresnel::fresnel_cell_integral(Cell1D::pos_tail(p[1]));
    EXPECT_LE(std::abs(line - fresnel::fresnel_cell_integral(Cell1D::full_line())), 1e-12);
  }
}

TEST(Properties, ReductionOfOneIsOne) {
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 6; ++k) {
    const int n = 1 + k % 2;
    std::vector<double> times;
    double t = 0.0;
    for (int j = 0; j < n; ++j) times.push_back(t += 0.2 + u(rng));
    const fresnel::IncrementSchedule s{times, 0.0, 2.0 * u(rng) - 1.0};
    const Complex v =
        cylinder::reduce_cylinder_integral([](std::span<const double>) { return Complex(1.0); }, cylinder::TimeSet(times), s, 1e-6);
    EXPECT_LE(std::abs(v - 1.0), 1e-5) << "n = " << n;
  }
}
