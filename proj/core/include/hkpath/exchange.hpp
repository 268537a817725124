#pragma once

// Numerical witnesses around the exchange of the path integral and the
// perturbation series: growth of the sums of |g0|, the bounded-convergence
// diagnostic, and partial sums against sliced kernels.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/pathint.hpp"

namespace hkpath::exchange {

using Complex = std::complex<double>;
using fresnel::IncrementSchedule;

struct GrowthRow {
  double radius;
  double sum;
  /// Cells per axis are 2^level.
  int level;
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
};

/// Riemann sums of |g0| volume over uniform divisions of [-R, R]^n, one row per
/// radius. Throws InvalidArgument unless radii are positive and increasing.
GrowthTable abs_g0_growth(const IncrementSchedule& sched, std::span<const double> radii, int level = 6);

/// An associated element (x, N, I[N]) with N the schedule's times.
struct Sample {
  std::vector<gauge::ExtReal> tags;
  std::vector<gauge::Cell1D> cells;
};

using Integrand = std::function<Complex(const Sample&)>;
using Family = std::function<Complex(int m, const Sample&)>;
using Beta = std::function<double(const Sample&)>;

enum class BetaVerdict { Bounded, Unbounded };

std::string to_string(BetaVerdict v);

struct ProbeRow {
  double radius;
  double integral;
  /// Growth exponent log(I_k / I_{k-1}) / log(R_k / R_{k-1}); 0 on the first row.
  double exponent;
};

struct BetaProbe {
  std::vector<ProbeRow> rows;
  BetaVerdict verdict = BetaVerdict::Bounded;
};

struct LabConfig {
  std::uint64_t seed = 0x5eed5eedULL;
  std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
  int samples = 256;
  double eps = 1e-6;
  /// Finite tags are drawn from [-window, window].
  double window = 4.0;
  double max_cell = 0.5;
  /// Share of samples with one infinite tag.
  double infinite_fraction = 0.25;
  int m_cap = 64;
  /// Cell width of the probe divisions, coarsened so that no probe sum
  /// exceeds probe_cells cells.
  double probe_width = 0.125;
  long probe_cells = 1L << 21;
  /// Exponent above which growth counts as unbounded.
  double probe_exponent = 0.5;
};

/// Window sums of beta over [-R, R]^n for every configured radius. The verdict
/// is Unbounded when the last two growth exponents are both at least
/// probe_exponent (doubling ratios of 2 give exponent 1).
BetaProbe probe_beta(const Beta& beta, const IncrementSchedule& sched, const LabConfig& cfg = {});

struct ConvergenceWitness {
  int m = 0;
  std::vector<Sample> samples;
  /// max |h_m - h| / beta over the samples at the reported m.
  double max_ratio = 0.0;
  BetaProbe beta_probe;
};

/// Smallest m in [0, m_cap] with |h_m - h| < eps beta at every sample, plus
/// the window probe of beta. Throws NoMFound when no m qualifies.
ConvergenceWitness bounded_convergence_diagnostic(const Family& family, const Integrand& limit, const Beta& beta,
                                                  const IncrementSchedule& sched, const LabConfig& cfg = {});

/// Deterministic samples for the configured seed: finite tags on cells of
/// width up to max_cell, and a share with one infinite tag on a tail.
std::vector<Sample> draw_samples(const IncrementSchedule& sched, const LabConfig& cfg);

/// g^T(x(N)) |I[N]| through incremental_density.
Integrand g0_integrand(const IncrementSchedule& sched);
Beta abs_g0(const IncrementSchedule& sched);
/// Gaussian mass prod_j int_{I_j} exp(-x^2) dx, positive and integrable.
Beta gaussian_beta();

/// sum_j V(x_{j-1}, t_{j-1}) dt_j with x_0 the origin point. A term whose left
/// point is infinite uses the last finite tag instead.
double action_sum(const pathint::Potential& v, const IncrementSchedule& sched, const Sample& s);

/// h_m = g0 sum_{r <= m} (-i S)^r / r! with S = action_sum.
Family partial_sum_family(const IncrementSchedule& sched, const pathint::Potential& v);
/// h = g0 exp(-i S).
Integrand partial_sum_limit(const IncrementSchedule& sched, const pathint::Potential& v);

struct ComparisonRow {
  int m;
  Complex partial_sum;
  Complex sliced;
  double difference;
};

struct ExchangeReport {
  std::vector<ComparisonRow> rows;
  ConvergenceWitness witness;
  double eps = 0.0;
};

/// Rows for m = 0..m_max. The witness runs the partial-sum family with
/// beta = |g0| on the query's schedule, capped at two increments.
ExchangeReport exchange_experiment(const pathint::PropagatorQuery& q, int m_max, const LabConfig& lab = {},
                                   const pathint::PathintConfig& config = {});

}  // namespace hkpath::exchange
