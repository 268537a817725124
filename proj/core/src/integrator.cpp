#include "hkpath/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "hkpath/error.hpp"
#include "hkpath/summation.hpp"

namespace hkpath::integrate {

namespace {

constexpr int kRuleOrder = 20;
constexpr double kEps = 2.220446049250313e-16;

GaussRule build_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

Complex checked_eval(const RealFn& f, double x) {
  Complex v;
  try {
    v = f(x);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::IntegrandError, std::string("integrand threw: ") + e.what());
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    fail(ErrorCode::IntegrandError, "integrand not finite at x = " + std::to_string(x));
  }
  return v;
}

struct CellValue {
  Complex value;
  double magnitude;  // sum of |w_i f(x_i)|, the rounding scale of `value`
  double spread;     // sum of |w_i (f(x_i) - mean)|
};

/// Point-cell value of one cell: the Gauss-Legendre sum over (u, v].
CellValue cell_value(const RealFn& f, double u, double v) {
  const GaussRule& rule = gauss_legendre(kRuleOrder);
  const double half = 0.5 * (v - u);
  const double mid = 0.5 * (u + v);
  ComplexCompensatedSum acc;
  double magnitude = 0.0;
  std::array<Complex, kRuleOrder> samples;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    samples[i] = checked_eval(f, mid + half * rule.nodes[i]);
    const Complex term = rule.weights[i] * samples[i];
    acc.add(term);
    magnitude += std::abs(term);
  }
  const Complex mean = 0.5 * acc.value();
  double spread = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) spread += rule.weights[i] * std::abs(samples[i] - mean);
  return {half * acc.value(), std::abs(half) * magnitude, std::abs(half) * spread};
}

struct Pass {
  Complex value{};
  double err = 0.0;
  std::size_t cells = 0;
  bool ok = false;
};

struct Leaf {
  double u;
  double v;
  Complex left;
  Complex right;
  double diff;      // error estimate
  double raw_diff;  // |halves - whole|
  double magnitude;
  int depth;
  int stalls;
};

/// A cell together with its halves. raw_diff is |halves - whole|; diff
/// inflates it toward the spread of f on the cell when the two disagree by
/// more than a smooth integrand would (the QUADPACK scaling). Rules that
/// straddle a jump can err alike, so raw_diff alone undersells them.
Leaf make_leaf(const RealFn& f, double u, double v, const Complex& whole, int depth, double parent_diff,
               int parent_stalls) {
  const double mid = 0.5 * (u + v);
  const CellValue l = cell_value(f, u, mid);
  const CellValue r = cell_value(f, mid, v);
  const double raw = std::abs(l.value + r.value - whole);
  const double spread = l.spread + r.spread;
  double diff = raw;
  if (spread > 0.0 && raw > 0.0) diff = std::max(raw, spread * std::min(1.0, std::pow(200.0 * raw / spread, 1.5)));
  Leaf leaf{u, v, l.value, r.value, diff, raw, l.magnitude + r.magnitude, depth, 0};
  // A resolved cell improves by many orders per halving. Rounding noise in f
  // (a large phase, say) only halves, so such stalls are counted.
  leaf.stalls = raw > 1e-3 * parent_diff ? parent_stalls + 1 : 0;
  return leaf;
}

/// Noise-limited: the halves disagree only at the rounding level of f.
bool is_noise(const Leaf& leaf) {
  if (leaf.raw_diff <= 64.0 * kEps * leaf.magnitude) return true;
  return leaf.stalls >= 3 && leaf.raw_diff <= 1e-6 * leaf.magnitude;
}

/// Global refinement: the leaf whose halves disagree most is split until the
/// summed disagreement of the leaves is within tol.
Pass adaptive_pass(const RealFn& f, double lo, double hi, double tol, const IntegratorConfig& cfg) {
  Pass pass;
  const double length = hi - lo;
  const int n0 = std::max(1, cfg.initial_cells);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<Leaf> leaves;
  std::vector<std::size_t> done;
  const auto worse = [&](std::size_t x, std::size_t y) {
    if (leaves[x].diff != leaves[y].diff) return leaves[x].diff < leaves[y].diff;
    return leaves[x].u > leaves[y].u;
  };
  std::vector<std::size_t> heap;
  double active = 0.0;
  double frozen = 0.0;

  const auto admit = [&](Leaf leaf) {
    leaves.push_back(leaf);
    const std::size_t id = leaves.size() - 1;
    if (is_noise(leaf)) {
      done.push_back(id);
      frozen += leaf.diff;
      return;
    }
    heap.push_back(id);
    std::push_heap(heap.begin(), heap.end(), worse);
    active += leaf.diff;
  };

  for (int k = 0; k < n0; ++k) {
    const double u = lo + length * k / n0;
    const double v = (k + 1 == n0) ? hi : lo + length * (k + 1) / n0;
    admit(make_leaf(f, u, v, cell_value(f, u, v).value, 0, inf, 0));
  }
  pass.cells = static_cast<std::size_t>(n0);

  while (!heap.empty()) {
    if (active <= tol) {
      // The running total drifts under subtraction; confirm from scratch.
      CompensatedSum exact;
      for (std::size_t id : heap) exact.add(leaves[id].diff);
      active = exact.value();
      if (active <= tol) break;
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    const std::size_t id = heap.back();
    heap.pop_back();
    const Leaf leaf = leaves[id];
    active -= leaf.diff;
    const double mid = 0.5 * (leaf.u + leaf.v);
    if (leaf.depth >= cfg.max_depth || !(mid > leaf.u && mid < leaf.v)) return pass;
    pass.cells += 2;
    if (pass.cells > cfg.max_cells) return pass;
    admit(make_leaf(f, leaf.u, mid, leaf.left, leaf.depth + 1, leaf.raw_diff, leaf.stalls));
    admit(make_leaf(f, mid, leaf.v, leaf.right, leaf.depth + 1, leaf.raw_diff, leaf.stalls));
  }

  // Leaves in left-to-right order so the sum does not depend on heap layout.
  std::vector<std::size_t> order(heap);
  order.insert(order.end(), done.begin(), done.end());
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return leaves[x].u < leaves[y].u; });
  ComplexCompensatedSum value;
  CompensatedSum err;
  for (std::size_t id : order) {
    value.add(leaves[id].left + leaves[id].right);
    err.add(leaves[id].diff);
  }
  pass.value = value.value();
  pass.err = err.value();
  pass.ok = true;
  return pass;
}

/// Shrinks the window toward `anchor` (lo when from_left) and tags the last
/// cell at the anchor.
std::optional<Pass> endpoint_pass(const RealFn& f, double lo, double hi, double tol, bool from_left,
                                  const IntegratorConfig& cfg) {
  const double length = hi - lo;
  double eta = 0.5 * length;
  Pass body = from_left ? adaptive_pass(f, lo + eta, hi, 0.5 * tol, cfg)
                        : adaptive_pass(f, lo, hi - eta, 0.5 * tol, cfg);
  if (!body.ok) return std::nullopt;

  ComplexCompensatedSum value;
  value.add(body.value);
  CompensatedSum err;
  err.add(body.err);
  std::size_t cells = body.cells;

  const double small = tol / 8.0;
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.endpoint_max_halvings; ++k) {
    const double piece_tol = 0.5 * tol * (0.5 * eta) / length;
    Pass piece = from_left ? adaptive_pass(f, lo + 0.5 * eta, lo + eta, piece_tol, cfg)
                           : adaptive_pass(f, hi - eta, hi - 0.5 * eta, piece_tol, cfg);
    cells += piece.cells;
    if (!piece.ok) return std::nullopt;
    value.add(piece.value);
    err.add(piece.err);
    eta *= 0.5;
    const double magnitude = std::abs(piece.value);
    if (magnitude <= small && previous <= small) {
      const double anchor = from_left ? lo : hi;
      Complex tagged{};
      try {
        tagged = checked_eval(f, anchor);
      } catch (const Error&) {
        tagged = Complex{};
      }
      value.add(tagged * eta);
      err.add(magnitude);
      Pass out;
      out.value = value.value();
      out.err = err.value();
      out.cells = cells;
      out.ok = out.err <= tol;
      return out;
    }
    previous = magnitude;
  }
  return std::nullopt;
}

void check_window(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    fail(ErrorCode::InvalidArgument, "integration window must be finite with lo < hi");
  }
}

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss rule order must be positive");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
  return it->second;
}

IntegrationReport hk_integrate_1d(const RealFn& f, double lo, double hi, double tol,
                                  const IntegratorConfig& config) {
  check_window(lo, hi);
  check_tol(tol);
  Pass direct = adaptive_pass(f, lo, hi, tol, config);
  std::size_t cells = direct.cells;
  if (direct.ok) {
    return {direct.value, direct.err, cells, direct.err <= tol};
  }
  if (config.endpoint_limit) {
    for (bool from_left : {true, false}) {
      auto shrunk = endpoint_pass(f, lo, hi, tol, from_left, config);
      if (shrunk && shrunk->ok) {
        return {shrunk->value, shrunk->err, cells + shrunk->cells, true};
      }
    }
  }
  fail(ErrorCode::NoConvergence, "refinement cap reached on (" + std::to_string(lo) + ", " +
                                     std::to_string(hi) + "]");
}

IntegrationReport hk_integrate_nd(const VecFn& f, std::span<const double> lo, std::span<const double> hi,
                                  double tol, const IntegratorConfig& config) {
  const std::size_t n = lo.size();
  if (n == 0 || hi.size() != n) fail(ErrorCode::InvalidArgument, "box bounds must have equal, nonzero length");
  if (n > config.max_dimension) {
    fail(ErrorCode::DimensionCap, "dimension " + std::to_string(n) + " exceeds cap " +
                                      std::to_string(config.max_dimension));
  }
  check_tol(tol);
  for (std::size_t j = 0; j < n; ++j) check_window(lo[j], hi[j]);

  std::vector<double> point(n);
  std::size_t cells = 0;
  double err_total = 0.0;

  // Inner integrals are computed to tol / (2 W): their error integrated over
  // the outer width W then takes at most half of the tolerance.
  std::function<Complex(std::size_t, double)> level = [&](std::size_t d, double level_tol) -> Complex {
    const double width = hi[d] - lo[d];
    RealFn g;
    if (d + 1 == n) {
      g = [&, d](double x) {
        point[d] = x;
        return f(std::span<const double>(point));
      };
    } else {
      const double inner_tol = level_tol / (2.0 * width);
      g = [&, d, inner_tol](double x) {
        point[d] = x;
        return level(d + 1, inner_tol);
      };
    }
    const IntegrationReport r = hk_integrate_1d(g, lo[d], hi[d], level_tol, config);
    cells += r.refinements;
    if (d == 0) err_total = r.abs_error_estimate;
    return r.value;
  };

  const Complex value = level(0, 0.5 * tol);
  return {value, err_total, cells, err_total <= tol};
}

void OscillatoryTailSpec::validate() const {
  const Complex c = phase_quadratic_coefficient;
  if (c == Complex{}) fail(ErrorCode::InvalidArgument, "phase coefficient must be nonzero");
  if (c.real() > 0.0) fail(ErrorCode::InvalidArgument, "phase coefficient must have Re c <= 0");
  if (c.real() == 0.0 && c.imag() < 0.0) {
    fail(ErrorCode::InvalidArgument, "purely imaginary phase coefficient needs Im c >= 0");
  }
  if (direction != 1 && direction != -1) fail(ErrorCode::InvalidArgument, "direction must be +1 or -1");
  if (!std::isfinite(lower_limit)) fail(ErrorCode::InvalidArgument, "lower limit must be finite");
}

Complex extrapolate_to_zero(std::span<const double> x, std::span<const Complex> y) {
  if (x.empty() || x.size() != y.size()) fail(ErrorCode::InvalidArgument, "extrapolation needs matching samples");
  std::vector<Complex> p(y.begin(), y.end());
  const std::size_t m = p.size();
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t i = 0; i + level < m; ++i) {
      // Neville: P_{i..i+level}(0) from P_{i..i+level-1}(0) and P_{i+1..i+level}(0).
      p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
    }
  }
  return p[0];
}

Complex oscillatory_improper(const OscillatoryTailSpec& spec, double tol, const IntegratorConfig& config) {
  spec.validate();
  check_tol(tol);
  if (config.damping_levels < 1 || !(config.damping_start > 0.0)) {
    fail(ErrorCode::InvalidArgument, "damping schedule needs at least two positive points");
  }
  const Complex half_c = 0.5 * spec.phase_quadratic_coefficient;
  // The integrand is even, so (-inf, L] maps onto (-L, +inf).
  const double lower = spec.direction > 0 ? spec.lower_limit : -spec.lower_limit;

  std::vector<double> eps;
  std::vector<Complex> values;
  const double level_tol = tol / 64.0;
  for (int k = 0; k <= config.damping_levels; ++k) {
    const double e = std::ldexp(config.damping_start, -k);
    const Complex alpha = half_c - e;
    const double decay = -alpha.real();
    // exp(Re(alpha) x^2) < e^-40 beyond `upper`.
    double upper = std::sqrt(40.0 / decay);
    if (upper <= lower) upper = std::sqrt(lower * lower + 40.0 / decay);
    const auto report = hk_integrate_1d([alpha](double x) { return std::exp(alpha * (x * x)); }, lower, upper,
                                        level_tol, config);
    eps.push_back(e);
    values.push_back(report.value);
  }

  const Complex all = extrapolate_to_zero(eps, values);
  const Complex previous = extrapolate_to_zero(std::span<const double>(eps).first(eps.size() - 1),
                                               std::span<const Complex>(values).first(values.size() - 1));
  if (std::abs(all - previous) > tol) {
    fail(ErrorCode::NoConvergence, "damping extrapolation unstable: last two estimates differ by " +
                                       std::to_string(std::abs(all - previous)));
  }
  return all;
}

Complex oscillatory_full_line(Complex c, double tol, const IntegratorConfig& config, double core_half_width) {
  OscillatoryTailSpec right{c, core_half_width, +1};
  right.validate();
  if (!(core_half_width > 0.0)) fail(ErrorCode::InvalidArgument, "core half width must be positive");
  const Complex half_c = 0.5 * c;
  const auto core = hk_integrate_1d([half_c](double x) { return std::exp(half_c * (x * x)); }, -core_half_width,
                                    core_half_width, tol / 4.0, config);
  const Complex tail_right = oscillatory_improper(right, tol / 4.0, config);
  const Complex tail_left = oscillatory_improper({c, -core_half_width, -1}, tol / 4.0, config);
  return tail_left + core.value + tail_right;
}

double alexiewicz_seminorm(const RealFn& f, double lo, double hi, int grid, const IntegratorConfig& config) {
  check_window(lo, hi);
  if (grid < 2) fail(ErrorCode::InvalidArgument, "Alexiewicz grid needs at least 2 points");
  const double seg_tol = config.tol_1d / grid;
  ComplexCompensatedSum prefix;
  double sup = 0.0;
  double left = lo;
  for (int k = 1; k <= grid; ++k) {
    const double right = (k == grid) ? hi : lo + (hi - lo) * k / grid;
    prefix.add(hk_integrate_1d(f, left, right, seg_tol, config).value);
    sup = std::max(sup, std::abs(prefix.value()));
    left = right;
  }
  return sup;
}

}  // namespace hkpath::integrate
