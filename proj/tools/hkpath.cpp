// hkpath: command-line front end for the library.
//
// Exit codes: 0 success, 1 validation or numerical failure, 2 usage error.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hkpath/acceptance.hpp"
#include "hkpath/config.hpp"
#include "hkpath/error.hpp"
#include "hkpath/exchange.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/pathint.hpp"
#include "hkpath/serialize.hpp"

namespace {

using namespace hkpath;
using Complex = std::complex<double>;
using serialize::format12;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "i", "-2i", "0.5", "-1+2i", "1-0.5i".
Complex parse_complex(std::string s) {
  std::erase(s, ' ');
  if (s.empty()) throw UsageError("empty complex number");
  if (s.back() != 'i') {
    std::size_t used = 0;
    const double re = std::stod(s, &used);
    if (used != s.size()) throw UsageError("bad complex number '" + s + "'");
    return {re, 0.0};
  }
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto coeff = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw UsageError("bad complex number '" + t + "'");
    return v;
  };
  if (split == std::string::npos) return {0.0, coeff(s)};
  std::size_t used = 0;
  const std::string re_part = s.substr(0, split);
  const double re = std::stod(re_part, &used);
  if (used != re_part.size()) throw UsageError("bad complex number '" + s + "i'");
  return {re, coeff(s.substr(split))};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_output(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + name + " in " + dir);
  out << text;
}

std::string complex_cells(Complex z) { return format12(z.real()) + "," + format12(z.imag()); }

gauge::Gauge1D parse_gauge(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || text.substr(0, colon) != "const") {
    throw UsageError("gauge must be const:delta");
  }
  const double delta = std::stod(text.substr(colon + 1));
  if (!(delta > 0.0)) throw UsageError("gauge value must be positive");
  return gauge::Gauge1D::constant(delta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Henstock-Kurzweil gauge integrals and time-sliced path integrals"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  app.add_option("--config", config_path, "JSON run configuration (default: $HKPATH_CONFIG)");

  // fresnel
  auto* fresnel_cmd = app.add_subcommand("fresnel", "int exp(c x^2 / 2) dx against sqrt(2 pi / -c)");
  std::string c_text = "i";
  std::vector<double> table;
  fresnel_cmd->add_option("--c", c_text, "coefficient c, e.g. i, 2i, -0.1+i");
  fresnel_cmd->add_option("--table", table, "u0 u1 count: incomplete Fresnel table instead")->expected(3);

  // division
  auto* division_cmd = app.add_subcommand("division", "build or validate a tagged division of the line");
  std::string gauge_text = "const:0.5";
  std::optional<std::string> validate_path;
  std::optional<double> left_end;
  std::optional<double> right_end;
  division_cmd->add_option("--gauge", gauge_text, "constant gauge const:delta");
  division_cmd->add_option("--validate", validate_path, "division JSON to check against the gauge");
  division_cmd->add_option("--left", left_end, "left tail end a");
  division_cmd->add_option("--right", right_end, "right tail end b");

  // kernel
  auto* kernel_cmd = app.add_subcommand("kernel", "propagator values for a JSON query");
  std::string query_path;
  std::vector<double> xis;
  kernel_cmd->add_option("--query", query_path, "query JSON")->required();
  kernel_cmd->add_option("--xi", xis, "end points x0 x1 count: tabulate over xi")->expected(3);

  // perturb and exchange share the query flags.
  std::string v_text = "const:1";
  double tau = 1.0;
  double xi_end = 0.0;
  int slices = 4;
  int m_max = 6;
  auto add_query_flags = [&](CLI::App* cmd) {
    cmd->add_option("--V", v_text, "potential: zero, const:c or harmonic:omega");
    cmd->add_option("--tau", tau, "duration tau - tau'");
    cmd->add_option("--xi", xi_end, "end point xi (start 0)");
    cmd->add_option("--slices", slices, "time slices n");
    cmd->add_option("--mmax", m_max, "highest order m");
  };
  auto* perturb_cmd = app.add_subcommand("perturb", "perturbation terms psi_r and partial sums");
  add_query_flags(perturb_cmd);
  auto* exchange_cmd = app.add_subcommand("exchange", "growth table, convergence witness and comparison");
  add_query_flags(exchange_cmd);
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> eps;
  exchange_cmd->add_option("--out", out_dir, "also write CSV and JSON files here (default: output.directory)");
  exchange_cmd->add_option("--seed", seed, "sampling seed");
  exchange_cmd->add_option("--samples", samples, "association samples");
  exchange_cmd->add_option("--eps", eps, "epsilon of the diagnostic");

  auto* selftest_cmd = app.add_subcommand("selftest", "run acceptance criteria 1-8");
  auto* config_cmd = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    config::RunConfig cfg = config::resolve_config(config_path);
    std::ostream& out = std::cout;

    if (*config_cmd) {
      out << config::to_json(cfg);
      return kOk;
    }

    if (*fresnel_cmd) {
      if (!table.empty()) {
        const int count = static_cast<int>(table[2]);
        if (count < 1 || static_cast<double>(count) != table[2]) throw UsageError("table count must be a positive integer");
        out << serialize::fresnel_csv(fresnel::tabulate_incomplete(table[0], table[1], count));
        return kOk;
      }
      const Complex c = parse_complex(c_text);
      const Complex value = integrate::oscillatory_full_line(c, cfg.integrator.tol_1d, cfg.integrator);
      const Complex reference = std::sqrt(2.0 * M_PI / -c);
      out << "# format_version " << serialize::kFormatVersion << "\n";
      out << "c_re,c_im,value_re,value_im,reference_re,reference_im,diff\n";
      out << complex_cells(c) << "," << complex_cells(value) << "," << complex_cells(reference) << ","
          << format12(std::abs(value - reference)) << "\n";
      return kOk;
    }

    if (*division_cmd) {
      const gauge::Gauge1D g = parse_gauge(gauge_text);
      if (validate_path) {
        const auto d = serialize::division_from_json(read_file(*validate_path));
        const auto report = gauge::validate_division(d, g);
        out << serialize::validity_to_json(report);
        return report.ok() ? kOk : kFailed;
      }
      gauge::CousinOptions opts;
      opts.left_tail_end = left_end;
      opts.right_tail_end = right_end;
      out << serialize::division_to_json(gauge::cousin_division(g, opts));
      return kOk;
    }

    if (*kernel_cmd) {
      const auto q = serialize::query_from_json(read_file(query_path));
      std::vector<pathint::KernelRow> rows;
      if (xis.empty()) {
        rows.push_back({q.xi_end, pathint::psi_sliced(q, cfg.pathint)});
      } else {
        const int count = static_cast<int>(xis[2]);
        if (count < 1 || static_cast<double>(count) != xis[2]) throw UsageError("xi count must be a positive integer");
        std::vector<double> pts;
        for (int k = 0; k < count; ++k) pts.push_back(count == 1 ? xis[0] : xis[0] + (xis[1] - xis[0]) * k / (count - 1));
        rows = pathint::kernel_table(q, pts, cfg.pathint);
      }
      out << serialize::kernel_csv(rows);
      return kOk;
    }

    pathint::PropagatorQuery q;
    q.potential = serialize::parse_potential(v_text);
    q.tau_end = tau;
    q.xi_end = xi_end;
    q.slices = slices;
    if (m_max < 0) throw UsageError("--mmax must be nonnegative");

    if (*perturb_cmd) {
      const auto terms = pathint::psi_terms(m_max, q, cfg.pathint);
      out << "# format_version " << serialize::kFormatVersion << "\n";
      out << "r,term_re,term_im,partial_re,partial_im\n";
      Complex partial = 0.0;
      for (int r = 0; r <= m_max; ++r) {
        partial += terms[static_cast<std::size_t>(r)];
        out << r << "," << complex_cells(terms[static_cast<std::size_t>(r)]) << "," << complex_cells(partial) << "\n";
      }
      return kOk;
    }

    if (*exchange_cmd) {
      if (seed) cfg.lab.seed = *seed;
      if (samples) cfg.lab.samples = *samples;
      if (eps) cfg.lab.eps = *eps;
      config::validate(cfg);
      const auto report = exchange::exchange_experiment(q, m_max, cfg.lab, cfg.pathint);
      const auto sched = fresnel::IncrementSchedule::uniform(q.tau_start, q.tau_end, 1, q.xi_start);
      const auto growth = exchange::abs_g0_growth(sched, cfg.lab.radii);
      const std::string comparison = serialize::comparison_csv(report.rows);
      const std::string verdict = serialize::verdict_json(report.witness, report.eps);
      out << comparison << verdict;
      if (out_dir || cfg.output_dir != ".") {
        const std::string dir = out_dir.value_or(cfg.output_dir);
        write_output(dir, "comparison.csv", comparison);
        write_output(dir, "verdict.json", verdict);
        write_output(dir, "growth.csv", serialize::growth_csv(growth));
        write_output(dir, "probe.csv", serialize::probe_csv(report.witness.beta_probe));
      }
      return kOk;
    }

    if (*selftest_cmd) {
      bool all = true;
      for (int id = 1; id <= acceptance::kCriteria; ++id) {
        const auto r = acceptance::run_criterion(id, cfg.lab.seed);
        out << acceptance::format_line(r) << std::endl;
        all = all && r.passed;
      }
      return all ? kOk : kFailed;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: bad number (" << e.what() << ")\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << "\n";
    const bool usage = e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InvalidArgument;
    return usage ? kUsage : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
