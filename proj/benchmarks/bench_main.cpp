#include <benchmark/benchmark.h>

#include <cmath>

#include "hkpath/exchange.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/pathint.hpp"

using namespace hkpath;

static void BM_Integrate1D(benchmark::State& state) {
  const double tol = std::pow(10.0, -static_cast<double>(state.range(0)));
  for (auto _ : state) {
    auto r = integrate::hk_integrate_1d([](double x) { return std::complex<double>(std::cos(x * x), std::sin(x)); },
                                        -3.0, 3.0, tol);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_Integrate1D)->Arg(6)->Arg(9)->Arg(12);

static void BM_IncompleteFresnel(benchmark::State& state) {
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fresnel::incomplete_fresnel(u));
    u = u > 20.0 ? 0.0 : u + 0.37;
  }
}
BENCHMARK(BM_IncompleteFresnel);

static void BM_FresnelFullLine(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate::oscillatory_full_line({0.0, 1.0}, 1e-8));
  }
}
BENCHMARK(BM_FresnelFullLine)->Unit(benchmark::kMillisecond);

static void BM_PsiSliced(benchmark::State& state) {
  pathint::PropagatorQuery q;
  q.xi_end = 0.7;
  q.slices = static_cast<int>(state.range(0));
  q.potential = pathint::Potential::harmonic(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(pathint::psi_sliced(q));
}
BENCHMARK(BM_PsiSliced)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Growth(benchmark::State& state) {
  const auto s = fresnel::IncrementSchedule::uniform(0.0, 1.0, static_cast<int>(state.range(0)));
  const std::vector<double> radii{1, 2, 4, 8};
  for (auto _ : state) benchmark::DoNotOptimize(exchange::abs_g0_growth(s, radii, 4));
}
BENCHMARK(BM_Growth)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
