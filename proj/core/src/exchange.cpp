#include "hkpath/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::exchange {

using gauge::Cell1D;
using gauge::ExtReal;

namespace {

void check_radii(std::span<const double> radii) {
  if (radii.empty()) fail(ErrorCode::InvalidArgument, "no radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) fail(ErrorCode::InvalidArgument, "radii must be positive");
    if (k > 0 && !(radii[k] > radii[k - 1])) fail(ErrorCode::InvalidArgument, "radii must be strictly increasing");
  }
}

// Sum of beta over the uniform division of [-r, r]^n with k cells per axis,
// each tagged at its right end.
double window_sum(const Beta& beta, std::size_t n, double r, long k) {
  const double w = 2.0 * r / static_cast<double>(k);
  std::vector<long> idx(n, 0);
  Sample s;
  s.tags.assign(n, ExtReal(0.0));
  s.cells.assign(n, Cell1D::full_line());
  CompensatedSum acc;
  for (;;) {
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = -r + w * static_cast<double>(idx[j]);
      const double hi = idx[j] + 1 == k ? r : lo + w;
      s.cells[j] = Cell1D::bounded(lo, hi);
      s.tags[j] = hi;
    }
    acc.add(beta(s));
    std::size_t j = 0;
    while (j < n && ++idx[j] == k) idx[j++] = 0;
    if (j == n) break;
  }
  return acc.value();
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

double gaussian_mass(const Cell1D& c) {
  const double half = 0.5 * std::sqrt(std::numbers::pi);
  switch (c.kind()) {
    case gauge::CellKind::FullLine: return 2.0 * half;
    case gauge::CellKind::NegTail: return half * std::erfc(-c.hi());
    case gauge::CellKind::PosTail: return half * std::erfc(c.lo());
    case gauge::CellKind::Bounded:
      if (c.lo() >= 0.0) return half * (std::erfc(c.lo()) - std::erfc(c.hi()));
      if (c.hi() <= 0.0) return half * (std::erfc(-c.hi()) - std::erfc(-c.lo()));
      return half * (std::erf(c.hi()) - std::erf(c.lo()));
  }
  return 0.0;
}

// sum_{r <= m} z^r / r!
Complex exp_partial(Complex z, int m) {
  Complex term = 1.0;
  Complex sum = 1.0;
  for (int r = 1; r <= m; ++r) {
    term *= z / static_cast<double>(r);
    sum += term;
  }
  return sum;
}

}  // namespace

std::string to_string(BetaVerdict v) { return v == BetaVerdict::Bounded ? "BOUNDED" : "UNBOUNDED"; }

GrowthTable abs_g0_growth(const IncrementSchedule& sched, std::span<const double> radii, int level) {
  sched.validate();
  check_radii(radii);
  if (level < 0 || level > 20) fail(ErrorCode::InvalidArgument, "level must lie in [0, 20]");
  const std::size_t n = sched.times.size();
  const long k = 1L << level;
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > 1e8) {
    fail(ErrorCode::ResourceLimit, "growth division would exceed 1e8 cells");
  }
  const Beta beta = abs_g0(sched);
  GrowthTable table;
  for (double r : radii) table.rows.push_back({r, window_sum(beta, n, r, k), level});
  return table;
}

BetaProbe probe_beta(const Beta& beta, const IncrementSchedule& sched, const LabConfig& cfg) {
  sched.validate();
  check_radii(cfg.radii);
  if (!(cfg.probe_width > 0.0) || cfg.probe_cells < 1) fail(ErrorCode::InvalidArgument, "bad probe division");
  const std::size_t n = sched.times.size();
  const auto per_axis_cap =
      static_cast<long>(std::floor(std::pow(static_cast<double>(cfg.probe_cells), 1.0 / static_cast<double>(n)) + 1e-9));
  BetaProbe probe;
  for (double r : cfg.radii) {
    const long k = std::clamp(static_cast<long>(std::ceil(2.0 * r / cfg.probe_width)), 1L, std::max(per_axis_cap, 1L));
    const double integral = window_sum(beta, n, r, k);
    double exponent = 0.0;
    if (!probe.rows.empty()) {
      const ProbeRow& prev = probe.rows.back();
      exponent = prev.integral > 0.0 && integral > 0.0
                     ? std::log(integral / prev.integral) / std::log(r / prev.radius)
                     : (integral > prev.integral ? std::numeric_limits<double>::infinity() : 0.0);
    }
    probe.rows.push_back({r, integral, exponent});
  }
  const std::size_t rows = probe.rows.size();
  probe.verdict = rows >= 3 && probe.rows[rows - 1].exponent >= cfg.probe_exponent &&
                          probe.rows[rows - 2].exponent >= cfg.probe_exponent
                      ? BetaVerdict::Unbounded
                      : BetaVerdict::Bounded;
  return probe;
}

std::vector<Sample> draw_samples(const IncrementSchedule& sched, const LabConfig& cfg) {
  sched.validate();
  if (cfg.samples < 1) fail(ErrorCode::InvalidArgument, "samples must be at least 1");
  if (!(cfg.window > 0.0) || !(cfg.max_cell > 0.0)) fail(ErrorCode::InvalidArgument, "window and max_cell must be positive");
  const std::size_t n = sched.times.size();
  std::mt19937_64 rng(cfg.seed);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(cfg.samples));
  for (int s = 0; s < cfg.samples; ++s) {
    Sample sample;
    const bool infinite = unit(rng) < cfg.infinite_fraction;
    const auto inf_axis = static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const double x = cfg.window * (2.0 * unit(rng) - 1.0);
      const bool left = unit(rng) < 0.5;
      if (infinite && j == inf_axis) {
        sample.tags.push_back(left ? ExtReal::neg_inf() : ExtReal::pos_inf());
        sample.cells.push_back(left ? Cell1D::neg_tail(x) : Cell1D::pos_tail(x));
        continue;
      }
      const double w = cfg.max_cell * (1.0 - unit(rng));
      sample.tags.push_back(x);
      sample.cells.push_back(left ? Cell1D::bounded(x, x + w) : Cell1D::bounded(x - w, x));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

ConvergenceWitness bounded_convergence_diagnostic(const Family& family, const Integrand& limit, const Beta& beta,
                                                  const IncrementSchedule& sched, const LabConfig& cfg) {
  if (!(cfg.eps > 0.0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  if (cfg.m_cap < 0) fail(ErrorCode::InvalidArgument, "m_cap must be nonnegative");
  ConvergenceWitness w;
  w.samples = draw_samples(sched, cfg);
  std::vector<Complex> h;
  std::vector<double> b;
  for (const auto& s : w.samples) {
    h.push_back(limit(s));
    b.push_back(beta(s));
  }
  bool found = false;
  for (int m = 0; m <= cfg.m_cap && !found; ++m) {
    double worst = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
      const double diff = std::abs(family(m, w.samples[k]) - h[k]);
      const double ratio = diff == 0.0 ? 0.0 : (b[k] > 0.0 ? diff / b[k] : std::numeric_limits<double>::infinity());
      worst = std::max(worst, ratio);
      if (!(ratio < cfg.eps)) ok = false;
    }
    if (ok) {
      w.m = m;
      w.max_ratio = worst;
      found = true;
    }
  }
  if (!found) {
    fail(ErrorCode::NoMFound, "no m <= " + std::to_string(cfg.m_cap) + " meets eps = " + std::to_string(cfg.eps));
  }
  w.beta_probe = probe_beta(beta, sched, cfg);
  return w;
}

Integrand g0_integrand(const IncrementSchedule& sched) {
  return [sched](const Sample& s) { return fresnel::incremental_density(s.tags, s.cells, sched); };
}

Beta abs_g0(const IncrementSchedule& sched) {
  return [sched](const Sample& s) { return std::abs(fresnel::incremental_density(s.tags, s.cells, sched)); };
}

Beta gaussian_beta() {
  return [](const Sample& s) {
    double m = 1.0;
    for (const auto& c : s.cells) m *= gaussian_mass(c);
    return m;
  };
}

double action_sum(const pathint::Potential& v, const IncrementSchedule& sched, const Sample& s) {
  const auto dt = sched.increments();
  if (s.tags.size() != dt.size()) fail(ErrorCode::ScheduleError, "sample and schedule lengths differ");
  CompensatedSum acc;
  double x = sched.origin_point;
  double t = sched.origin_time;
  for (std::size_t j = 0; j < dt.size(); ++j) {
    acc.add(v(x, t) * dt[j]);
    if (s.tags[j].is_finite()) x = s.tags[j].value();
    t = sched.times[j];
  }
  return acc.value();
}

Family partial_sum_family(const IncrementSchedule& sched, const pathint::Potential& v) {
  return [sched, v](int m, const Sample& s) {
    const Complex z(0.0, -action_sum(v, sched, s));
    return fresnel::incremental_density(s.tags, s.cells, sched) * exp_partial(z, m);
  };
}

Integrand partial_sum_limit(const IncrementSchedule& sched, const pathint::Potential& v) {
  return [sched, v](const Sample& s) {
    return fresnel::incremental_density(s.tags, s.cells, sched) * std::polar(1.0, -action_sum(v, sched, s));
  };
}

ExchangeReport exchange_experiment(const pathint::PropagatorQuery& q, int m_max, const LabConfig& lab,
                                   const pathint::PathintConfig& config) {
  q.validate();
  if (m_max < 0) fail(ErrorCode::InvalidArgument, "m_max must be nonnegative");
  ExchangeReport report;
  report.eps = lab.eps;
  const auto terms = pathint::psi_terms(m_max, q, config);
  const Complex sliced = pathint::psi_sliced(q, config);
  Complex partial = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    partial += terms[static_cast<std::size_t>(m)];
    report.rows.push_back({m, partial, sliced, std::abs(partial - sliced)});
  }
  const auto sched = IncrementSchedule::uniform(q.tau_start, q.tau_end, std::min(q.slices, 2), q.xi_start);
  report.witness = bounded_convergence_diagnostic(partial_sum_family(sched, q.potential),
                                                  partial_sum_limit(sched, q.potential), abs_g0(sched), sched, lab);
  return report;
}

}  // namespace hkpath::exchange
