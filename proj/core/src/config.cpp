#include "hkpath/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hkpath/error.hpp"

namespace hkpath::config {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::ConfigError, what); }

// Reads section[key] into out when present, checking the JSON type.
class Section {
 public:
  Section(const json& root, const std::string& name) : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) bad("section '" + name + "' must be an object");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    const json& v = node_->at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) bad(where(key) + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) bad(where(key) + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned()) bad(where(key) + " must be nonnegative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) bad(where(key) + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) bad(where(key) + " must be a string");
    } else {
      if (!v.is_array()) bad(where(key) + " must be an array");
    }
    out = v.get<T>();
  }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& [key, _] : node_->items()) {
      if (!seen_.contains(key)) bad("unknown key " + where(key));
    }
  }

 private:
  std::string where(const std::string& key) const { return name_ + "." + key; }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed config: ") + e.what());
  }
  if (!root.is_object()) bad("config must be a JSON object");
  for (const auto& [key, _] : root.items()) {
    static const std::set<std::string> known{"format_version", "integrator", "pathint", "lab", "output"};
    if (!known.contains(key)) bad("unknown section '" + key + "'");
  }
  if (root.contains("format_version") && root["format_version"] != kFormatVersion) {
    bad("unsupported format_version");
  }

  RunConfig cfg;
  try {
    Section in(root, "integrator");
    auto& ic = cfg.integrator;
    in.read("tol_1d", ic.tol_1d);
    in.read("tol_nd", ic.tol_nd);
    in.read("max_cells", ic.max_cells);
    in.read("max_depth", ic.max_depth);
    in.read("initial_cells", ic.initial_cells);
    in.read("max_dimension", ic.max_dimension);
    in.read("damping_start", ic.damping_start);
    in.read("damping_levels", ic.damping_levels);
    in.read("endpoint_limit", ic.endpoint_limit);
    in.read("endpoint_max_halvings", ic.endpoint_max_halvings);
    in.finish();

    Section pi(root, "pathint");
    auto& pc = cfg.pathint;
    std::string sampling = pc.sampling == pathint::Sampling::Left ? "left" : "symmetric";
    pi.read("mass", pc.mass);
    pi.read("phi_lo", pc.phi_lo);
    pi.read("phi_hi", pc.phi_hi);
    pi.read("nodes", pc.nodes);
    pi.read("tail", pc.tail);
    pi.read("sampling", sampling);
    pi.read("rel_tol", pc.rel_tol);
    pi.read("max_points", pc.max_points);
    pi.finish();
    if (sampling == "left") {
      pc.sampling = pathint::Sampling::Left;
    } else if (sampling == "symmetric") {
      pc.sampling = pathint::Sampling::Symmetric;
    } else {
      bad("pathint.sampling must be \"left\" or \"symmetric\"");
    }

    Section lab(root, "lab");
    auto& lc = cfg.lab;
    lab.read("seed", lc.seed);
    lab.read("radii", lc.radii);
    lab.read("samples", lc.samples);
    lab.read("eps", lc.eps);
    lab.read("window", lc.window);
    lab.read("max_cell", lc.max_cell);
    lab.read("infinite_fraction", lc.infinite_fraction);
    lab.read("m_cap", lc.m_cap);
    lab.read("probe_width", lc.probe_width);
    lab.read("probe_cells", lc.probe_cells);
    lab.read("probe_exponent", lc.probe_exponent);
    lab.finish();

    Section out(root, "output");
    out.read("directory", cfg.output_dir);
    out.finish();
  } catch (const json::exception& e) {
    bad(std::string("bad config value: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

RunConfig resolve_config(const std::optional<std::string>& path) {
  if (path) return load_config(*path);
  if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') return load_config(env);
  return {};
}

void validate(const RunConfig& cfg) {
  const auto& ic = cfg.integrator;
  if (!(ic.tol_1d > 0.0) || !(ic.tol_nd > 0.0)) bad("integrator tolerances must be positive");
  if (ic.max_cells < 2 || ic.max_depth < 1 || ic.initial_cells < 1 || ic.max_dimension < 1) {
    bad("integrator caps must be positive");
  }
  if (!(ic.damping_start > 0.0) || ic.damping_levels < 1) bad("damping schedule must be positive");
  const auto& pc = cfg.pathint;
  if (!(pc.mass > 0.0)) bad("pathint.mass must be positive");
  if (!(pc.phi_lo > 0.0) || !(pc.phi_hi > pc.phi_lo) || !(pc.phi_hi < 1.5707963267948966)) {
    bad("pathint damping angles need 0 < phi_lo < phi_hi < pi/2");
  }
  if (pc.nodes < 2 || !(pc.tail > 0.0) || !(pc.rel_tol > 0.0) || pc.max_points < 16) {
    bad("pathint nodes, tail, rel_tol or max_points out of range");
  }
  const auto& lc = cfg.lab;
  if (lc.radii.empty()) bad("lab.radii is empty");
  for (std::size_t k = 0; k < lc.radii.size(); ++k) {
    if (!(lc.radii[k] > 0.0) || (k > 0 && !(lc.radii[k] > lc.radii[k - 1]))) {
      bad("lab.radii must be positive and strictly increasing");
    }
  }
  if (lc.samples < 1 || !(lc.eps > 0.0) || !(lc.window > 0.0) || !(lc.max_cell > 0.0) || lc.m_cap < 0) {
    bad("lab samples, eps, window, max_cell or m_cap out of range");
  }
  if (!(lc.infinite_fraction >= 0.0 && lc.infinite_fraction <= 1.0)) bad("lab.infinite_fraction must lie in [0, 1]");
  if (!(lc.probe_width > 0.0) || lc.probe_cells < 1 || !(lc.probe_exponent > 0.0)) bad("lab probe settings out of range");
  if (cfg.output_dir.empty()) bad("output.directory is empty");
}

std::string to_json(const RunConfig& cfg) {
  const auto& ic = cfg.integrator;
  const auto& pc = cfg.pathint;
  const auto& lc = cfg.lab;
  json j;
  j["format_version"] = kFormatVersion;
  j["integrator"] = {{"tol_1d", ic.tol_1d},
                     {"tol_nd", ic.tol_nd},
                     {"max_cells", ic.max_cells},
                     {"max_depth", ic.max_depth},
                     {"initial_cells", ic.initial_cells},
                     {"max_dimension", ic.max_dimension},
                     {"damping_start", ic.damping_start},
                     {"damping_levels", ic.damping_levels},
                     {"endpoint_limit", ic.endpoint_limit},
                     {"endpoint_max_halvings", ic.endpoint_max_halvings}};
  j["pathint"] = {{"mass", pc.mass},
                  {"phi_lo", pc.phi_lo},
                  {"phi_hi", pc.phi_hi},
                  {"nodes", pc.nodes},
                  {"tail", pc.tail},
                  {"sampling", pc.sampling == pathint::Sampling::Left ? "left" : "symmetric"},
                  {"rel_tol", pc.rel_tol},
                  {"max_points", pc.max_points}};
  j["lab"] = {{"seed", lc.seed},
              {"radii", lc.radii},
              {"samples", lc.samples},
              {"eps", lc.eps},
              {"window", lc.window},
              {"max_cell", lc.max_cell},
              {"infinite_fraction", lc.infinite_fraction},
              {"m_cap", lc.m_cap},
              {"probe_width", lc.probe_width},
              {"probe_cells", lc.probe_cells},
              {"probe_exponent", lc.probe_exponent}};
  j["output"] = {{"directory", cfg.output_dir}};
  return j.dump(2) + "\n";
}

}  // namespace hkpath::config
