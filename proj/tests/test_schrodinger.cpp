#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hkpath/error.hpp"
#include "hkpath/schrodinger.hpp"

using namespace hkpath;
using namespace hkpath::schrodinger;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// pi^{-1/4} (1 + i t)^{-1/2} exp(-x^2 / (2 (1 + i t))): the free evolution of
// the unit Gaussian.
GridWavefunction gaussian(double t, double x0, double dx, int n) {
  GridWavefunction g{x0, dx, {}};
  const Complex s = 1.0 + kI * t;
  for (int k = 0; k < n; ++k) {
    const double x = g.x(static_cast<std::size_t>(k));
    g.values.push_back(std::pow(kPi, -0.25) / std::sqrt(s) * std::exp(-x * x / (2.0 * s)));
  }
  return g;
}

}  // namespace

TEST(CrankNicolson, FreeGaussian) {
  const auto start = gaussian(0.0, -30.0, 0.02, 3001);
  const auto out = schrodinger_reference(pathint::Potential::zero(), start, 1.0, 1e-4);
  EXPECT_LE(l2_distance(out, gaussian(1.0, -30.0, 0.02, 3001)), 1e-4);
}

TEST(CrankNicolson, NormIsConserved) {
  const auto start = gaussian(0.0, -20.0, 0.05, 801);
  const auto out = schrodinger_reference(pathint::Potential::harmonic(0.7), start, 2.0, 2e-3);
  EXPECT_NEAR(l2_norm(out), l2_norm(start), 1e-8);
}

TEST(CrankNicolson, ConstantPotentialIsAPhase) {
  GridWavefunction narrow{-15.0, 0.03, {}};
  for (int k = 0; k < 1001; ++k) {
    const double x = narrow.x(static_cast<std::size_t>(k));
    narrow.values.push_back(std::exp(-x * x / (2.0 * 0.01)));
  }
  const double c = 1.3;
  const double tau = 0.6;
  const auto free = schrodinger_reference(pathint::Potential::zero(), narrow, tau, 5e-4);
  auto shifted = schrodinger_reference(pathint::Potential::constant(c), narrow, tau, 5e-4);
  for (auto& v : shifted.values) v *= std::polar(1.0, c * tau);
  EXPECT_LE(l2_distance(shifted, free), 1e-3 * l2_norm(free));
}

TEST(CrankNicolson, Errors) {
  const auto start = gaussian(0.0, -5.0, 0.05, 201);
  try {
    schrodinger_reference(pathint::Potential::zero(), start, 1.0, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
  EXPECT_THROW(schrodinger_reference(pathint::Potential::zero(), start, -1.0, 1e-3), Error);
  EXPECT_THROW(l2_distance(start, gaussian(0.0, -5.0, 0.05, 200)), Error);
}
