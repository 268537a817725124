#include "hkpath/pathint.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "hkpath/cylinder.hpp"
#include "hkpath/error.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::pathint {

namespace {

constexpr double kPi = std::numbers::pi;

// The FFTW planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

/// Linear convolution out[k] = h sum_l K[k - l] g[l] on m nodes, via an FFT
/// of length p >= 2m - 1.
class FftConvolver {
 public:
  explicit FftConvolver(int m) : m_(m) {
    p_ = 1;
    while (p_ < 2 * m_) p_ *= 2;
    a_ = fftw_alloc_complex(static_cast<std::size_t>(p_));
    b_ = fftw_alloc_complex(static_cast<std::size_t>(p_));
    if (a_ == nullptr || b_ == nullptr) {
      release();
      fail(ErrorCode::ResourceLimit, "cannot allocate FFT buffers");
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft_1d(p_, a_, a_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(p_, a_, a_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;
  ~FftConvolver() { release(); }

  /// `kernel` holds K at offsets -(m-1)..(m-1), index d + m - 1.
  void set_kernel(std::span<const Complex> kernel) {
    std::fill(cbuf(b_), cbuf(b_) + p_, Complex{});
    for (int d = 0; d < m_; ++d) cbuf(b_)[d] = kernel[static_cast<std::size_t>(d + m_ - 1)];
    for (int d = 1; d < m_; ++d) cbuf(b_)[p_ - d] = kernel[static_cast<std::size_t>(m_ - 1 - d)];
    fftw_execute_dft(forward_, b_, b_);
  }

  void convolve(std::span<Complex> data, double h) {
    std::fill(cbuf(a_), cbuf(a_) + p_, Complex{});
    std::copy(data.begin(), data.end(), cbuf(a_));
    fftw_execute_dft(forward_, a_, a_);
    for (int k = 0; k < p_; ++k) cbuf(a_)[k] *= cbuf(b_)[k];
    fftw_execute_dft(backward_, a_, a_);
    const double scale = h / p_;
    for (int k = 0; k < m_; ++k) data[static_cast<std::size_t>(k)] = cbuf(a_)[k] * scale;
  }

 private:
  static Complex* cbuf(fftw_complex* p) { return reinterpret_cast<Complex*>(p); }

  void release() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
    if (a_) fftw_free(a_);
    if (b_) fftw_free(b_);
    forward_ = backward_ = nullptr;
    a_ = b_ = nullptr;
  }

  int m_;
  int p_ = 1;
  fftw_complex* a_ = nullptr;
  fftw_complex* b_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Normalized one-step kernel sqrt(-a/pi) exp(a y^2), a = (i m / 2 dt) e^{i phi}.
struct Kernel {
  Complex a;
  Complex norm;

  Kernel(double dt, double phi, double mass)
      : a(Complex(0.0, mass / (2.0 * dt)) * std::polar(1.0, phi)), norm(std::sqrt(-a / kPi)) {}

  Complex operator()(double y) const { return norm * std::exp(a * (y * y)); }
};

/// Slice layout: times, increments, and the duration each node's potential
/// weight covers under the chosen sampling.
struct Slicing {
  std::vector<double> t;
  std::vector<double> dt;
  double start_weight = 0.0;
  std::vector<double> interior_weight;  // for x_1 .. x_{n-1}
  double end_weight = 0.0;
};

Slicing make_slicing(const PropagatorQuery& q, Sampling sampling) {
  Slicing s;
  s.t = q.times();
  const std::size_t n = s.t.size() - 1;
  for (std::size_t j = 1; j <= n; ++j) s.dt.push_back(s.t[j] - s.t[j - 1]);
  if (sampling == Sampling::Left) {
    s.start_weight = s.dt.front();
    for (std::size_t j = 1; j < n; ++j) s.interior_weight.push_back(s.dt[j]);
    s.end_weight = 0.0;
  } else {
    s.start_weight = 0.5 * s.dt.front();
    for (std::size_t j = 1; j < n; ++j) s.interior_weight.push_back(0.5 * (s.dt[j - 1] + s.dt[j]));
    s.end_weight = 0.5 * s.dt.back();
  }
  return s;
}

/// Coefficients (-i theta)^k / k!, k = 0..m, of exp(-i lambda theta).
void series(double theta, int m, std::vector<Complex>& out) {
  out.assign(static_cast<std::size_t>(m) + 1, Complex{});
  out[0] = 1.0;
  for (int k = 1; k <= m; ++k) out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k) - 1] * Complex(0.0, -theta) / static_cast<double>(k);
}

/// Product of two truncated power series in lambda.
std::vector<Complex> series_product(std::span<const Complex> x, std::span<const Complex> y) {
  std::vector<Complex> out(x.size(), Complex{});
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (std::size_t k = 0; k <= r; ++k) out[r] += x[k] * y[r - k];
  }
  return out;
}

double grid_center(const PropagatorQuery& q) { return 0.5 * (q.xi_start + q.xi_end); }

/// Largest |dV/dx| times the weight duration over the interior nodes, from
/// central differences on a sampling grid of the window.
double potential_band(const PropagatorQuery& q, const Slicing& s, double center, double extent) {
  if (q.potential.kind() == Potential::Kind::Zero || q.potential.kind() == Potential::Kind::Constant) return 0.0;
  if (s.interior_weight.empty()) return 0.0;
  const int samples = 2048;
  const double step = 2.0 * extent / samples;
  double band = 0.0;
  // Time-dependent potentials are sampled at every interior time.
  for (std::size_t j = 0; j < s.interior_weight.size(); ++j) {
    const double t = s.t[j + 1];
    for (int k = 0; k < samples; ++k) {
      const double x = center - extent + (k + 0.5) * step;
      const double slope = (q.potential(x + 0.5 * step, t) - q.potential(x - 0.5 * step, t)) / step;
      band = std::max(band, std::abs(slope) * s.interior_weight[j]);
    }
    if (q.potential.kind() == Potential::Kind::Harmonic) {
      band = std::max(band, std::abs(q.potential.parameter() * q.potential.parameter()) *
                                (std::abs(center) + extent) * s.interior_weight[j]);
    }
  }
  return band;
}

struct GridNeeds {
  double extent;
  double spacing;
};

GridNeeds grid_needs(const PropagatorQuery& q, const Slicing& s, double phi, const PathintConfig& cfg) {
  const double sphi = std::sin(phi);
  const double total = s.t.back() - s.t.front();
  const double dt_min = *std::min_element(s.dt.begin(), s.dt.end());
  // |K| = |norm| exp(-(m sin phi / 2 dt) y^2); every path from xi' to xi stays
  // within this reach of the chord up to exp(-tail).
  const double reach = std::sqrt(2.0 * total * cfg.tail / (cfg.mass * sphi));
  const double extent = 0.5 * std::abs(q.xi_end - q.xi_start) + reach;
  // |FT K|(w) = exp(-w^2 dt sin phi / 2m); an integrand K(x - y) g(y) has band
  // at most 2 w_K + w_V, and the node sum is exact below 2 pi / h.
  const double band_kernel = std::sqrt(2.0 * cfg.mass * cfg.tail / (dt_min * sphi));
  const double band_potential = potential_band(q, s, grid_center(q), extent);
  const double spacing = 2.0 * kPi / (2.0 * band_kernel + 1.5 * band_potential);
  return {extent, spacing};
}

void check_config(const PathintConfig& cfg) {
  if (!(cfg.mass > 0.0) || !std::isfinite(cfg.mass)) fail(ErrorCode::InvalidArgument, "mass must be positive");
  if (!(cfg.phi_lo > 0.0) || !(cfg.phi_lo < cfg.phi_hi) || !(cfg.phi_hi < kPi / 2) || cfg.nodes < 2) {
    fail(ErrorCode::InvalidArgument, "damping nodes need 0 < phi_lo < phi_hi < pi/2 and at least two nodes");
  }
  if (!(cfg.tail > 0.0) || !(cfg.rel_tol > 0.0)) fail(ErrorCode::InvalidArgument, "tail and rel_tol must be positive");
}

/// Sliced coefficients of lambda^0..lambda^m on one grid. With m < 0 the
/// full weights exp(-i theta) are used and a single value is returned.
std::vector<Complex> sliced_on_grid(const PropagatorQuery& q, const Slicing& s, const SliceGrid& grid, int m,
                                    const PathintConfig& cfg) {
  const bool full = m < 0;
  const std::size_t terms = full ? 1 : static_cast<std::size_t>(m) + 1;
  const std::size_t n = s.dt.size();
  const int points = grid.points;
  const double h = 2.0 * grid.extent / points;
  const double left = grid_center(q) - grid.extent;
  std::vector<double> y(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) y[static_cast<std::size_t>(k)] = left + k * h;

  const auto weight_series = [&](double theta) {
    std::vector<Complex> c;
    if (full) {
      c.assign(1, std::exp(Complex(0.0, -theta)));
    } else {
      series(theta, m, c);
    }
    return c;
  };

  // u^{(r)}(x_1) = K_1(x_1 - xi') * [start weight]_r
  const std::vector<Complex> start = weight_series(q.potential(q.xi_start, s.t[0]) * s.start_weight);
  std::vector<std::vector<Complex>> u(terms, std::vector<Complex>(static_cast<std::size_t>(points)));
  {
    const Kernel k1(s.dt[0], grid.damping, cfg.mass);
    for (int k = 0; k < points; ++k) {
      const Complex kv = k1(y[static_cast<std::size_t>(k)] - q.xi_start);
      for (std::size_t r = 0; r < terms; ++r) u[r][static_cast<std::size_t>(k)] = kv * start[r];
    }
  }

  FftConvolver conv(points);
  std::vector<Complex> kernel(static_cast<std::size_t>(2 * points - 1));
  double kernel_dt = -1.0;
  std::vector<Complex> c;
  std::vector<Complex> mixed(terms);
  for (std::size_t j = 1; j < n; ++j) {
    // Potential weight at the node x_j, time t_j.
    for (int k = 0; k < points; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      const double theta = q.potential(y[idx], s.t[j]) * s.interior_weight[j - 1];
      if (full) {
        u[0][idx] *= std::exp(Complex(0.0, -theta));
        continue;
      }
      series(theta, m, c);
      for (std::size_t r = 0; r < terms; ++r) {
        Complex acc{};
        for (std::size_t kk = 0; kk <= r; ++kk) acc += c[kk] * u[r - kk][idx];
        mixed[r] = acc;
      }
      for (std::size_t r = 0; r < terms; ++r) u[r][idx] = mixed[r];
    }
    if (j + 1 == n) break;
    if (s.dt[j] != kernel_dt) {
      const Kernel kj(s.dt[j], grid.damping, cfg.mass);
      for (int d = -(points - 1); d < points; ++d) kernel[static_cast<std::size_t>(d + points - 1)] = kj(d * h);
      conv.set_kernel(kernel);
      kernel_dt = s.dt[j];
    }
    for (std::size_t r = 0; r < terms; ++r) conv.convolve(u[r], h);
  }

  const Kernel kn(s.dt[n - 1], grid.damping, cfg.mass);
  std::vector<Complex> out(terms);
  for (std::size_t r = 0; r < terms; ++r) {
    ComplexCompensatedSum acc;
    for (int k = 0; k < points; ++k) {
      const auto idx = static_cast<std::size_t>(k);
      acc.add(kn(q.xi_end - y[idx]) * u[r][idx]);
    }
    out[r] = h * acc.value();
  }
  const std::vector<Complex> end = weight_series(q.potential(q.xi_end, s.t[n]) * s.end_weight);
  return series_product(out, end);
}

std::vector<double> chebyshev_nodes(const PathintConfig& cfg) {
  std::vector<double> phis(static_cast<std::size_t>(cfg.nodes));
  for (int k = 0; k < cfg.nodes; ++k) {
    phis[static_cast<std::size_t>(k)] = 0.5 * (cfg.phi_lo + cfg.phi_hi) +
                                        0.5 * (cfg.phi_hi - cfg.phi_lo) * std::cos(kPi * (k + 0.5) / cfg.nodes);
  }
  return phis;
}

/// Extrapolated coefficients (m >= 0) or full value (m < 0).
std::vector<Complex> extrapolated(const PropagatorQuery& q, int m, const PathintConfig& cfg) {
  q.validate();
  check_config(cfg);
  const Slicing s = make_slicing(q, cfg.sampling);
  const std::size_t terms = m < 0 ? 1 : static_cast<std::size_t>(m) + 1;

  if (s.dt.size() == 1) {
    // A single increment needs no intermediate integration.
    const Complex free = psi0_closed(q, cfg.mass);
    std::vector<Complex> a;
    std::vector<Complex> b;
    const double theta0 = q.potential(q.xi_start, s.t[0]) * s.start_weight;
    const double theta1 = q.potential(q.xi_end, s.t[1]) * s.end_weight;
    if (m < 0) return {free * std::exp(Complex(0.0, -(theta0 + theta1)))};
    series(theta0, m, a);
    series(theta1, m, b);
    auto out = series_product(a, b);
    for (auto& v : out) v *= free;
    return out;
  }

  const std::vector<double> phis = chebyshev_nodes(cfg);
  std::vector<std::vector<Complex>> by_term(terms);
  for (double phi : phis) {
    const SliceGrid grid = auto_grid(q, phi, cfg);
    const auto values = sliced_on_grid(q, s, grid, m, cfg);
    for (std::size_t r = 0; r < terms; ++r) by_term[r].push_back(values[r]);
  }

  const double scale = std::abs(psi0_closed(q, cfg.mass));
  std::vector<Complex> out(terms);
  for (std::size_t r = 0; r < terms; ++r) {
    out[r] = integrate::extrapolate_to_zero(phis, by_term[r]);
    // Nodes run from phi_hi down; the first is the farthest from 0.
    const Complex reduced = integrate::extrapolate_to_zero(std::span<const double>(phis).subspan(1),
                                                           std::span<const Complex>(by_term[r]).subspan(1));
    if (std::abs(out[r] - reduced) > cfg.rel_tol * scale) {
      fail(ErrorCode::NoConvergence, "damping extrapolation unstable for term " + std::to_string(r) +
                                         ": estimates differ by " + std::to_string(std::abs(out[r] - reduced)));
    }
  }
  return out;
}

}  // namespace

Potential Potential::zero() {
  return Potential(Kind::Zero, 0.0, [](double, double) { return 0.0; });
}

Potential Potential::constant(double c) {
  if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "constant potential must be finite");
  return Potential(Kind::Constant, c, [c](double, double) { return c; });
}

Potential Potential::harmonic(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) fail(ErrorCode::InvalidArgument, "harmonic frequency must be positive");
  return Potential(Kind::Harmonic, omega, [omega](double x, double) { return 0.5 * omega * omega * x * x; });
}

Potential Potential::custom(Fn fn) {
  if (!fn) fail(ErrorCode::InvalidArgument, "custom potential is empty");
  return Potential(Kind::Custom, 0.0, std::move(fn));
}

double Potential::operator()(double x, double t) const {
  const double v = fn_(x, t);
  if (!std::isfinite(v)) fail(ErrorCode::IntegrandError, "potential is not finite");
  return v;
}

void PropagatorQuery::validate() const {
  if (!std::isfinite(xi_start) || !std::isfinite(xi_end)) fail(ErrorCode::InvalidArgument, "end points must be finite");
  if (!(tau_start >= 0.0) || !std::isfinite(tau_end) || !(tau_end > tau_start)) {
    fail(ErrorCode::ScheduleError, "need 0 <= tau' < tau");
  }
  if (slices < 1) fail(ErrorCode::ScheduleError, "need at least one slice");
  if (!slice_times.empty()) {
    if (slice_times.size() != static_cast<std::size_t>(slices - 1)) {
      fail(ErrorCode::ScheduleError, "explicit slice times must list the n - 1 intermediate times");
    }
    double prev = tau_start;
    for (double t : slice_times) {
      if (!std::isfinite(t) || !(t > prev)) fail(ErrorCode::ScheduleError, "slice times must increase strictly");
      prev = t;
    }
    if (!(tau_end > prev)) fail(ErrorCode::ScheduleError, "slice times must lie before tau");
  }
}

std::vector<double> PropagatorQuery::times() const {
  validate();
  std::vector<double> t{tau_start};
  if (!slice_times.empty()) {
    t.insert(t.end(), slice_times.begin(), slice_times.end());
  } else {
    for (int j = 1; j < slices; ++j) t.push_back(tau_start + (tau_end - tau_start) * j / slices);
  }
  t.push_back(tau_end);
  return t;
}

Complex psi0_closed(const PropagatorQuery& q, double mass) {
  q.validate();
  if (!(mass > 0.0)) fail(ErrorCode::InvalidArgument, "mass must be positive");
  const double T = q.tau_end - q.tau_start;
  const double d = q.xi_end - q.xi_start;
  return std::sqrt(Complex(0.0, -mass / (2.0 * kPi * T))) * std::polar(1.0, mass * d * d / (2.0 * T));
}

Complex mehler_kernel(const PropagatorQuery& q, double omega) {
  q.validate();
  const double T = q.tau_end - q.tau_start;
  if (!(omega > 0.0) || !(omega * T < kPi)) fail(ErrorCode::InvalidArgument, "Mehler kernel needs 0 < omega T < pi");
  const double sn = std::sin(omega * T);
  const double cs = std::cos(omega * T);
  const double a = q.xi_end;
  const double b = q.xi_start;
  const double phase = omega * ((a * a + b * b) * cs - 2.0 * a * b) / (2.0 * sn);
  return std::sqrt(Complex(0.0, -omega / (2.0 * kPi * sn))) * std::polar(1.0, phase);
}

SliceGrid auto_grid(const PropagatorQuery& q, double phi, const PathintConfig& config) {
  q.validate();
  check_config(config);
  if (!(phi > 0.0) || !(phi < kPi / 2)) fail(ErrorCode::InvalidArgument, "damping angle must lie in (0, pi/2)");
  const Slicing s = make_slicing(q, config.sampling);
  const GridNeeds needs = grid_needs(q, s, phi, config);
  const double count = std::ceil(2.0 * needs.extent / needs.spacing);
  if (!(count <= config.max_points)) {
    fail(ErrorCode::ResourceLimit, "grid would need " + std::to_string(count) + " points");
  }
  int points = std::max(8, static_cast<int>(count));
  points += points % 2;
  return {needs.extent, points, phi};
}

Complex psi_sliced_at(const PropagatorQuery& q, const SliceGrid& grid, const PathintConfig& config) {
  q.validate();
  check_config(config);
  if (!(grid.extent > 0.0) || grid.points < 8 || grid.points % 2 != 0) {
    fail(ErrorCode::InvalidArgument, "grid needs extent > 0 and an even number of at least 8 points");
  }
  if (!(grid.damping > 0.0) || !(grid.damping < kPi / 2)) {
    fail(ErrorCode::InvalidArgument, "damping angle must lie in (0, pi/2)");
  }
  const Slicing s = make_slicing(q, config.sampling);
  if (s.dt.size() == 1) return extrapolated(q, -1, config)[0];
  const GridNeeds needs = grid_needs(q, s, grid.damping, config);
  const double spacing = 2.0 * grid.extent / grid.points;
  if (grid.extent < needs.extent || spacing > needs.spacing) {
    fail(ErrorCode::GridTooCoarse, "grid needs extent >= " + std::to_string(needs.extent) + " and spacing <= " +
                                       std::to_string(needs.spacing) + " at this damping");
  }
  return sliced_on_grid(q, s, grid, -1, config)[0];
}

Complex psi_sliced(const PropagatorQuery& q, const PathintConfig& config) { return extrapolated(q, -1, config)[0]; }

Complex psi0_sliced(const PropagatorQuery& q, const PathintConfig& config) {
  PropagatorQuery free = q;
  free.potential = Potential::zero();
  return psi_sliced(free, config);
}

std::vector<Complex> psi_terms(int m, const PropagatorQuery& q, const PathintConfig& config) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "term index must be nonnegative");
  auto terms = extrapolated(q, m, config);
  terms[0] = psi0_closed(q, config.mass);
  return terms;
}

Complex psi_r(int r, const PropagatorQuery& q, const PathintConfig& config) {
  if (r < 0) fail(ErrorCode::InvalidArgument, "term index must be nonnegative");
  if (r == 0) {
    q.validate();
    return psi0_closed(q, config.mass);
  }
  return psi_terms(r, q, config)[static_cast<std::size_t>(r)];
}

Complex perturbation_partial_sum(int m, const PropagatorQuery& q, const PathintConfig& config) {
  const auto terms = psi_terms(m, q, config);
  ComplexCompensatedSum acc;
  for (const auto& t : terms) acc.add(t);
  return acc.value();
}

Complex psi_sliced_raw(const PropagatorQuery& q, double tol, const PathintConfig& config) {
  q.validate();
  check_config(config);
  if (q.slices > 2) fail(ErrorCode::DimensionCap, "raw sums are offered for n <= 2 only");
  if (config.mass != 1.0) fail(ErrorCode::InvalidArgument, "raw sums use unit mass");
  const Slicing s = make_slicing(q, config.sampling);
  if (s.dt.size() == 1) return extrapolated(q, -1, config)[0];

  const double theta0 = q.potential(q.xi_start, s.t[0]) * s.start_weight;
  const double theta_end = q.potential(q.xi_end, s.t[2]) * s.end_weight;
  const double t1 = s.t[1];
  const double dt2 = s.dt[1];
  const double w1 = s.interior_weight[0];
  const Potential& v = q.potential;
  const double xi = q.xi_end;
  const Complex norm2 = std::sqrt(Complex(0.0, -1.0 / (2.0 * kPi * dt2)));
  auto f = [&](std::span<const double> x) {
    const double d = xi - x[0];
    const double phase = d * d / (2.0 * dt2) - theta0 - theta_end - v(x[0], t1) * w1;
    return norm2 * std::polar(1.0, phase);
  };
  const cylinder::TimeSet n({t1});
  fresnel::IncrementSchedule sched{{t1}, s.t[0], q.xi_start};
  return cylinder::reduce_cylinder_integral(f, n, sched, tol);
}

std::vector<KernelRow> kernel_table(const PropagatorQuery& q, std::span<const double> xis,
                                    const PathintConfig& config) {
  std::vector<KernelRow> rows;
  rows.reserve(xis.size());
  for (double xi : xis) {
    PropagatorQuery at = q;
    at.xi_end = xi;
    rows.push_back({xi, psi_sliced(at, config)});
  }
  return rows;
}

}  // namespace hkpath::pathint
