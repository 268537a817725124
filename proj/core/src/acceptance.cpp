#include "hkpath/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "hkpath/error.hpp"
#include "hkpath/exchange.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/pathint.hpp"
#include "hkpath/serialize.hpp"

namespace hkpath::acceptance {

using Complex = std::complex<double>;
using gauge::Cell1D;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double rel(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }

// Collects failures; the criterion passes when none were recorded.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 4) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failed_ == 0; }
  std::string detail() const {
    std::ostringstream out;
    out << checks_ - failed_ << "/" << checks_ << " checks";
    if (!notes_.empty()) out << "; " << notes_;
    for (const auto& f : failures_) out << "; FAILED " << f;
    return out.str();
  }

 private:
  int checks_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }
double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * unit(rng); }

void fresnel_values(Check& c, std::uint64_t) {
  const double tol = 1e-9;
  const Complex full = integrate::oscillatory_full_line(kI, tol);
  const double e1 = rel(full, std::sqrt(2.0 * kPi / -kI));
  c.expect(e1 <= 1e-6, "int exp(i x^2/2) rel " + sci(e1));
  const Complex full2 = integrate::oscillatory_full_line(2.0 * kI, tol);
  const double e2 = rel(full2, std::sqrt(kI * kPi));
  c.expect(e2 <= 1e-6, "int exp(i y^2) rel " + sci(e2));
  const Complex half = integrate::oscillatory_improper({2.0 * kI, 0.0, +1}, tol);
  const double want = 0.5 * std::sqrt(kPi / 2.0);
  const double ec = std::abs(half.real() - want);
  const double es = std::abs(half.imag() - want);
  c.expect(ec <= 1e-6, "int cos(u^2) err " + sci(ec));
  c.expect(es <= 1e-6, "int sin(u^2) err " + sci(es));
  c.note("worst " + sci(std::max({e1, e2, ec, es})));
}

// Product figure of per-axis partitions of the line.
std::vector<std::vector<Cell1D>> product_cells(const std::vector<Cell1D>& axis, std::size_t n) {
  std::vector<std::vector<Cell1D>> cells{{}};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Cell1D>> next;
    for (const auto& c : cells) {
      for (const auto& a : axis) {
        auto d = c;
        d.push_back(a);
        next.push_back(std::move(d));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

void normalization(Check& c, std::uint64_t seed) {
  const std::vector<Cell1D> axis{Cell1D::neg_tail(-1.5), Cell1D::bounded(-1.5, 0.25), Cell1D::bounded(0.25, 2.0),
                                 Cell1D::pos_tail(2.0)};
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::vector<Cell1D> full(n, Cell1D::full_line());
    const double e_cell = std::abs(fresnel::G_n_cell(full) - 1.0);
    const double e_fig = std::abs(fresnel::G_n_distribution(fresnel::FigureND(product_cells(axis, n))) - 1.0);
    c.expect(e_cell <= 1e-8, "G_" + std::to_string(n) + "(R^n) err " + sci(e_cell));
    c.expect(e_fig <= 1e-8, "G_" + std::to_string(n) + " over a partition err " + sci(e_fig));
    worst = std::max({worst, e_cell, e_fig});
  }
  std::mt19937_64 rng(seed);
  for (int s = 0; s < 5; ++s) {
    const int n = 1 + static_cast<int>(unit(rng) * 3.0);
    fresnel::IncrementSchedule sched;
    sched.origin_time = uniform(rng, 0.0, 1.0);
    sched.origin_point = uniform(rng, -1.0, 1.0);
    double t = sched.origin_time;
    for (int j = 0; j < n; ++j) sched.times.push_back(t += uniform(rng, 0.05, 2.0));
    const std::vector<Cell1D> full(static_cast<std::size_t>(n), Cell1D::full_line());
    const double e_full = std::abs(fresnel::incremental_distribution(full, sched) - 1.0);
    Complex sum = 0.0;
    for (const auto& cell : product_cells(axis, static_cast<std::size_t>(n))) {
      sum += fresnel::incremental_distribution(cell, sched);
    }
    const double e_part = std::abs(sum - 1.0);
    c.expect(e_full <= 1e-8, "G^T(full cells) err " + sci(e_full));
    c.expect(e_part <= 1e-8, "G^T over a partition err " + sci(e_part));
    worst = std::max({worst, e_full, e_part});
  }
  c.note("worst " + sci(worst));
}

void free_propagator(Check& c, std::uint64_t seed) {
  const double grid[5][2] = {{0.0, 1.0}, {0.5, 1.0}, {1.0, 0.5}, {-0.7, 1.3}, {1.5, 2.0}};
  double worst = 0.0;
  for (const auto& p : grid) {
    for (int n : {2, 4, 8}) {
      pathint::PropagatorQuery q;
      q.xi_end = p[0];
      q.tau_end = p[1];
      q.slices = n;
      const double e = rel(pathint::psi0_sliced(q), pathint::psi0_closed(q));
      c.expect(e <= 1e-3, "psi0_sliced n=" + std::to_string(n) + " rel " + sci(e));
      worst = std::max(worst, e);
    }
  }
  // Chapman-Kolmogorov: the intermediate integral at time s, as a gauge integral.
  std::mt19937_64 rng(seed ^ 0x3ULL);
  double worst_ck = 0.0;
  for (int k = 0; k < 5; ++k) {
    pathint::PropagatorQuery q;
    q.xi_start = uniform(rng, -1.0, 1.0);
    q.xi_end = uniform(rng, -1.0, 1.0);
    q.tau_end = uniform(rng, 0.5, 2.0);
    q.slices = 2;
    q.slice_times = {q.tau_end * uniform(rng, 0.2, 0.8)};
    const Complex want = pathint::psi0_closed(q);
    const double e = std::abs(pathint::psi_sliced_raw(q, 1e-7) - want) / std::abs(want);
    c.expect(e <= 1e-4, "Chapman-Kolmogorov residual " + sci(e));
    worst_ck = std::max(worst_ck, e);
  }
  c.note("sliced worst " + sci(worst) + ", CK worst " + sci(worst_ck));
}

void perturbation(Check& c, std::uint64_t) {
  const double cases[][3] = {{1.0, 0.0, 1.0}, {2.0, 0.0, 1.0}, {-0.5, 0.3, 2.3}, {1.5, 0.0, 1.2}};
  for (const auto& k : cases) {
    pathint::PropagatorQuery q;
    q.potential = pathint::Potential::constant(k[0]);
    q.tau_start = k[1];
    q.tau_end = k[2];
    q.xi_end = 0.4;
    q.slices = 4;
    const double ct = std::abs(k[0]) * (k[2] - k[1]);
    const Complex psi0 = pathint::psi0_closed(q);
    const Complex want = std::polar(1.0, -k[0] * (k[2] - k[1])) * psi0;
    const auto terms = pathint::psi_terms(12, q);
    Complex s = 0.0;
    double bound = 1.0;
    for (int m = 0; m <= 12; ++m) {
      s += terms[static_cast<std::size_t>(m)];
      bound *= ct / (m + 1);
      const double err = std::abs(s - want);
      c.expect(err <= bound * std::abs(psi0) + 1e-6, "S_" + std::to_string(m) + " err " + sci(err));
    }
    for (int r = 1; r <= 6; ++r) {
      const Complex ratio = terms[static_cast<std::size_t>(r)] / terms[static_cast<std::size_t>(r - 1)];
      const Complex expected = Complex(0.0, -k[0] * (k[2] - k[1])) / static_cast<double>(r);
      const double e = rel(ratio, expected);
      c.expect(e <= 1e-5, "psi_" + std::to_string(r) + " ratio rel " + sci(e));
    }
  }
}

void harmonic(Check& c, std::uint64_t) {
  pathint::PropagatorQuery q;
  q.xi_start = 0.2;
  q.xi_end = 0.7;
  q.tau_end = 0.5;
  q.slices = 16;
  q.potential = pathint::Potential::harmonic(0.5);
  const double e = rel(pathint::psi_sliced(q), pathint::mehler_kernel(q, 0.5));
  c.expect(e <= 1e-2, "Mehler rel " + sci(e));
  c.note("rel " + sci(e));
}

void growth_witness(Check& c, std::uint64_t seed) {
  const auto sched = fresnel::IncrementSchedule::uniform(0.0, 1.0, 1);
  const std::vector<double> radii{1, 2, 4, 8, 16, 32, 64};
  const auto table = exchange::abs_g0_growth(sched, radii);
  double worst = 0.0;
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const double want = 2.0 * radii[k] / std::sqrt(2.0 * kPi);
    const double e = std::abs(table.rows[k].sum - want);
    worst = std::max(worst, e);
    c.expect(e <= 1e-10, "R=" + serialize::format12(radii[k]) + " err " + sci(e));
    if (k > 0) c.expect(table.rows[k].sum > table.rows[k - 1].sum, "table not increasing");
  }
  exchange::LabConfig lab;
  lab.seed = seed;
  const auto g0 = exchange::probe_beta(exchange::abs_g0(sched), sched, lab);
  const auto gauss = exchange::probe_beta(exchange::gaussian_beta(), sched, lab);
  c.expect(g0.verdict == exchange::BetaVerdict::Unbounded, "|g0| probe not UNBOUNDED");
  c.expect(gauss.verdict == exchange::BetaVerdict::Bounded, "Gaussian probe not BOUNDED");
  c.note("worst " + sci(worst) + ", |g0| " + exchange::to_string(g0.verdict) + ", Gaussian " +
         exchange::to_string(gauss.verdict));
}

std::string exchange_outputs(std::uint64_t seed) {
  pathint::PropagatorQuery q;
  q.potential = pathint::Potential::constant(1.0);
  q.xi_end = 0.3;
  q.slices = 4;
  exchange::LabConfig lab;
  lab.seed = seed;
  lab.samples = 64;
  const auto rep = exchange::exchange_experiment(q, 6, lab);
  return serialize::comparison_csv(rep.rows) + serialize::verdict_json(rep.witness, rep.eps);
}

void properties(Check& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x7ULL);
  int violations = 0;
  int mismatches = 0;
  std::string first_json;
  for (int k = 0; k < 500; ++k) {
    const double scale = uniform(rng, 0.05, 1.0);
    const double freq = uniform(rng, 0.1, 5.0);
    const double shift = uniform(rng, 0.0, 2.0 * kPi);
    const double left = uniform(rng, 0.1, 2.0);
    const double right = uniform(rng, 0.1, 2.0);
    const gauge::Gauge1D g([=](gauge::ExtReal x) {
      if (x.is_neg_inf()) return left;
      if (x.is_pos_inf()) return right;
      return scale * (0.2 + std::abs(std::sin(freq * x.value() + shift)));
    });
    const auto d = gauge::cousin_division(g);
    const std::string text = serialize::division_to_json(d);
    if (k == 0) first_json = text;
    const auto back = serialize::division_from_json(text);
    violations += static_cast<int>(gauge::validate_division(d, g).violations.size());
    violations += static_cast<int>(gauge::validate_division(back, g).violations.size());
    bool same = back.items.size() == d.items.size();
    for (std::size_t i = 0; same && i < d.items.size(); ++i) {
      same = back.items[i].tag == d.items[i].tag && back.items[i].cell == d.items[i].cell;
    }
    if (!same) ++mismatches;
  }
  c.expect(violations == 0, std::to_string(violations) + " validator violations");
  c.expect(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");

  const double tol = 1e-9;
  int bad_lin = 0;
  int bad_conj = 0;
  int bad_add = 0;
  for (int k = 0; k < 200; ++k) {
    const Complex a(uniform(rng, -2, 2), uniform(rng, -2, 2));
    const double kf = uniform(rng, -6, 6);
    const double cf = uniform(rng, -1, 1);
    const double wg = uniform(rng, 0.5, 8);
    const double dg = uniform(rng, -1, 1);
    const Complex alpha(uniform(rng, -2, 2), uniform(rng, -2, 2));
    const Complex beta(uniform(rng, -2, 2), uniform(rng, -2, 2));
    const double lo = uniform(rng, -3, 0);
    const double hi = uniform(rng, 0.5, 3);
    const double mid = uniform(rng, lo + 0.1, hi - 0.1);
    const integrate::RealFn f = [=](double x) { return a * std::polar(1.0, kf * x) * (1.0 + cf * x * x); };
    const integrate::RealFn g = [=](double x) { return std::sin(wg * x) / (1.0 + x * x) + dg * std::exp(0.5 * x); };
    const integrate::RealFn comb = [&](double x) { return alpha * f(x) + beta * g(x); };
    const integrate::RealFn conj = [&](double x) { return std::conj(f(x)); };
    auto integral = [&](const integrate::RealFn& h, double u, double v) {
      return integrate::hk_integrate_1d(h, u, v, tol).value;
    };
    const Complex i_f = integral(f, lo, hi);
    const Complex i_g = integral(g, lo, hi);
    const double budget = tol * (1.0 + std::abs(alpha) + std::abs(beta)) * 4.0;
    if (std::abs(integral(comb, lo, hi) - (alpha * i_f + beta * i_g)) > budget) ++bad_lin;
    if (std::abs(integral(conj, lo, hi) - std::conj(i_f)) > 4.0 * tol) ++bad_conj;
    if (std::abs(integral(f, lo, mid) + integral(f, mid, hi) - i_f) > 6.0 * tol) ++bad_add;
  }
  c.expect(bad_lin == 0, std::to_string(bad_lin) + " linearity failures");
  c.expect(bad_conj == 0, std::to_string(bad_conj) + " conjugation failures");
  c.expect(bad_add == 0, std::to_string(bad_add) + " additivity failures");

  c.expect(exchange_outputs(seed) == exchange_outputs(seed), "exchange outputs differ between runs");
  c.expect(serialize::division_to_json(serialize::division_from_json(first_json)) == first_json,
           "division JSON not byte-stable");
  c.note("500 gauges, 200 integrand pairs");
}

void coexistence(Check& c, std::uint64_t seed) {
  pathint::PropagatorQuery q;
  q.potential = pathint::Potential::constant(1.0);
  q.xi_end = 0.3;
  q.slices = 4;
  exchange::LabConfig lab;
  lab.seed = seed;
  const auto rep = exchange::exchange_experiment(q, 12, lab);
  const double psi0 = std::abs(pathint::psi0_closed(q));
  double bound = 1.0;
  for (const auto& row : rep.rows) {
    bound /= row.m + 1;
    c.expect(row.difference <= bound * psi0 + 1e-6, "m=" + std::to_string(row.m) + " difference " + sci(row.difference));
  }
  const double last = rep.rows.back().difference;
  c.expect(last <= 1e-8 + 1e-6 * psi0, "final difference " + sci(last));
  c.expect(rep.witness.beta_probe.verdict == exchange::BetaVerdict::Unbounded, "|g0| probe not UNBOUNDED");
  c.note("series converges (m=12 diff " + sci(last) + ", witness m=" + std::to_string(rep.witness.m) +
         ") while beta=|g0| is " + exchange::to_string(rep.witness.beta_probe.verdict));
}

struct Entry {
  const char* name;
  double limit;
  void (*run)(Check&, std::uint64_t);
};

const Entry kEntries[kCriteria] = {
    {"Fresnel values", 10.0, fresnel_values},
    {"distribution normalization", 30.0, normalization},
    {"free propagator", 120.0, free_propagator},
    {"perturbation series", 120.0, perturbation},
    {"harmonic cross-check", 120.0, harmonic},
    {"non-absolute-integrability witness", 10.0, growth_witness},
    {"property suites", 300.0, properties},
    {"exchange coexistence report", 300.0, coexistence},
};

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  if (id < 1 || id > kCriteria) fail(ErrorCode::InvalidArgument, "criterion id must lie in 1..8");
  const Entry& entry = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = entry.name;
  r.time_limit = entry.limit;
  Check check;
  const auto start = std::chrono::steady_clock::now();
  try {
    entry.run(check, seed);
  } catch (const Error& e) {
    check.expect(false, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    check.expect(false, e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.expect(r.seconds <= entry.limit, "runtime over " + serialize::format12(entry.limit) + " s");
  r.passed = check.ok();
  r.detail = check.detail();
  return r;
}

std::vector<CriterionResult> run_all(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id, seed));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.2f s)", r.seconds);
  return std::string(r.passed ? "PASS" : "FAIL") + "  " + std::to_string(r.id) + "  " + r.name + "  " + buf + "  " +
         r.detail;
}

}  // namespace hkpath::acceptance
