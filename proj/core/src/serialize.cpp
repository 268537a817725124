#include "hkpath/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "hkpath/error.hpp"

namespace hkpath::serialize {

using gauge::Cell1D;
using gauge::CellKind;
using gauge::ExtReal;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::InvalidArgument, what); }

// The double nearest to the 12-digit rendering; nlohmann prints it back in
// at most 12 digits.
double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format12(x).c_str(), nullptr);
}

json ext(double x) {
  if (x == -INFINITY) return "-inf";
  if (x == INFINITY) return "+inf";
  return x;
}

double ext_from(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j == "-inf") return -INFINITY;
  if (j == "+inf") return INFINITY;
  bad(where + " must be a number, \"-inf\" or \"+inf\"");
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
}

std::string csv_header(const std::string& columns) {
  return "# format_version " + std::to_string(kFormatVersion) + "\n" + columns + "\n";
}

}  // namespace

std::string format12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string division_to_json(const gauge::Division1D& d) {
  json items = json::array();
  for (const auto& it : d.items) {
    items.push_back({{"tag", ext(it.tag.value())},
                     {"kind", gauge::to_string(it.cell.kind())},
                     {"bounds", {ext(it.cell.lo()), ext(it.cell.hi())}}});
  }
  return json{{"format_version", kFormatVersion}, {"items", items}}.dump(2) + "\n";
}

gauge::Division1D division_from_json(const std::string& text) {
  const json root = parse(text);
  if (!root.is_object() || !root.contains("items") || !root["items"].is_array()) bad("division needs an items array");
  if (root.value("format_version", kFormatVersion) != kFormatVersion) bad("unsupported format_version");
  gauge::Division1D d;
  for (const auto& it : root["items"]) {
    if (!it.is_object() || !it.contains("tag") || !it.contains("kind") || !it.contains("bounds")) {
      bad("division item needs tag, kind and bounds");
    }
    const json& b = it["bounds"];
    if (!b.is_array() || b.size() != 2) bad("bounds must be a pair");
    const double lo = ext_from(b[0], "bounds[0]");
    const double hi = ext_from(b[1], "bounds[1]");
    const std::string kind = it["kind"].is_string() ? it["kind"].get<std::string>() : "";
    Cell1D cell = Cell1D::full_line();
    if (kind == "neg_tail") {
      if (lo != -INFINITY) bad("neg_tail must start at -inf");
      cell = Cell1D::neg_tail(hi);
    } else if (kind == "bounded") {
      cell = Cell1D::bounded(lo, hi);
    } else if (kind == "pos_tail") {
      if (hi != INFINITY) bad("pos_tail must end at +inf");
      cell = Cell1D::pos_tail(lo);
    } else if (kind == "full_line") {
      if (lo != -INFINITY || hi != INFINITY) bad("full_line must span the line");
    } else {
      bad("unknown cell kind '" + kind + "'");
    }
    const ExtReal tag = ext_from(it["tag"], "tag");
    if (!gauge::tag_is_associated(tag, cell)) {
      fail(ErrorCode::AssociationError, "tag " + gauge::to_string(tag) + " not associated to " + gauge::to_string(cell));
    }
    d.items.push_back({tag, cell});
  }
  return d;
}

std::string validity_to_json(const gauge::ValidityReport& report) {
  json v = json::array();
  for (const auto& x : report.violations) {
    v.push_back({{"kind", gauge::to_string(x.kind)}, {"item", x.item}, {"detail", x.detail}});
  }
  return json{{"format_version", kFormatVersion}, {"ok", report.ok()}, {"violations", v}}.dump(2) + "\n";
}

std::string integration_to_json(const integrate::IntegrationReport& report) {
  return json{{"format_version", kFormatVersion},
              {"value", {round12(report.value.real()), round12(report.value.imag())}},
              {"abs_error_estimate", round12(report.abs_error_estimate)},
              {"refinements", report.refinements},
              {"converged", report.converged}}
             .dump(2) +
         "\n";
}

fresnel::IncrementSchedule schedule_from_json(const std::string& text) {
  const json root = parse(text);
  fresnel::IncrementSchedule s;
  try {
    if (!root.is_object() || !root.contains("times")) fail(ErrorCode::ScheduleError, "schedule needs times");
    s.times = root.at("times").get<std::vector<double>>();
    s.origin_time = root.value("origin_time", 0.0);
    s.origin_point = root.value("origin_point", 0.0);
  } catch (const json::exception& e) {
    fail(ErrorCode::ScheduleError, std::string("bad schedule: ") + e.what());
  }
  s.validate();
  return s;
}

pathint::Potential parse_potential(const std::string& text) {
  if (text == "zero" || text == "0") return pathint::Potential::zero();
  const auto colon = text.find(':');
  if (colon == std::string::npos) bad("potential must be zero, const:c or harmonic:omega");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  char* end = nullptr;
  const double value = std::strtod(arg.c_str(), &end);
  if (arg.empty() || *end != '\0' || !std::isfinite(value)) bad("bad potential parameter '" + arg + "'");
  if (kind == "const" || kind == "constant") return pathint::Potential::constant(value);
  if (kind == "harmonic") return pathint::Potential::harmonic(value);
  bad("unknown potential kind '" + kind + "'");
}

std::string potential_to_string(const pathint::Potential& v) {
  switch (v.kind()) {
    case pathint::Potential::Kind::Zero: return "zero";
    case pathint::Potential::Kind::Constant: return "const:" + format12(v.parameter());
    case pathint::Potential::Kind::Harmonic: return "harmonic:" + format12(v.parameter());
    case pathint::Potential::Kind::Custom: return "custom";
  }
  return "custom";
}

pathint::PropagatorQuery query_from_json(const std::string& text) {
  const json root = parse(text);
  if (!root.is_object()) bad("query must be a JSON object");
  pathint::PropagatorQuery q;
  try {
    for (const auto& [key, _] : root.items()) {
      static const char* known[] = {"format_version", "xi_start", "tau_start", "xi_end",
                                    "tau_end",        "slices",   "potential", "slice_times"};
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) bad("unknown query key '" + key + "'");
    }
    q.xi_start = root.value("xi_start", q.xi_start);
    q.tau_start = root.value("tau_start", q.tau_start);
    q.xi_end = root.value("xi_end", q.xi_end);
    q.tau_end = root.value("tau_end", q.tau_end);
    q.slices = root.value("slices", q.slices);
    if (root.contains("potential")) q.potential = parse_potential(root["potential"].get<std::string>());
    if (root.contains("slice_times")) q.slice_times = root["slice_times"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    bad(std::string("bad query: ") + e.what());
  }
  q.validate();
  return q;
}

std::string fresnel_csv(std::span<const fresnel::FresnelRow> rows) {
  std::ostringstream out;
  out << csv_header("u,re,im");
  for (const auto& r : rows) out << format12(r.u) << ',' << format12(r.value.real()) << ',' << format12(r.value.imag()) << '\n';
  return out.str();
}

std::string kernel_csv(std::span<const pathint::KernelRow> rows) {
  std::ostringstream out;
  out << csv_header("xi,re,im");
  for (const auto& r : rows) {
    out << format12(r.xi) << ',' << format12(r.value.real()) << ',' << format12(r.value.imag()) << '\n';
  }
  return out.str();
}

std::string growth_csv(const exchange::GrowthTable& table) {
  std::ostringstream out;
  out << csv_header("radius,sum,level");
  for (const auto& r : table.rows) out << format12(r.radius) << ',' << format12(r.sum) << ',' << r.level << '\n';
  return out.str();
}

std::string probe_csv(const exchange::BetaProbe& probe) {
  std::ostringstream out;
  out << csv_header("radius,integral,exponent");
  for (const auto& r : probe.rows) {
    out << format12(r.radius) << ',' << format12(r.integral) << ',' << format12(r.exponent) << '\n';
  }
  return out.str();
}

std::string comparison_csv(std::span<const exchange::ComparisonRow> rows) {
  std::ostringstream out;
  out << csv_header("m,partial_re,partial_im,sliced_re,sliced_im,difference");
  for (const auto& r : rows) {
    out << r.m << ',' << format12(r.partial_sum.real()) << ',' << format12(r.partial_sum.imag()) << ','
        << format12(r.sliced.real()) << ',' << format12(r.sliced.imag()) << ',' << format12(r.difference) << '\n';
  }
  return out.str();
}

std::string verdict_json(const exchange::ConvergenceWitness& w, double eps) {
  return json{{"format_version", kFormatVersion},
              {"beta_probe", exchange::to_string(w.beta_probe.verdict)},
              {"m_found", w.m},
              {"eps", round12(eps)},
              {"max_ratio", round12(w.max_ratio)},
              {"samples", w.samples.size()}}
             .dump(2) +
         "\n";
}

}  // namespace hkpath::serialize
