#pragma once

// Text formats for the CLI: JSON documents and CSV tables, all carrying
// format_version. Numbers are written with 12 significant digits, except
// division bounds, which use the shortest exact form so a division read back
// is the same division.

#include <span>
#include <string>

#include "hkpath/exchange.hpp"
#include "hkpath/fresnel.hpp"
#include "hkpath/gauge.hpp"
#include "hkpath/integrator.hpp"
#include "hkpath/pathint.hpp"

namespace hkpath::serialize {

inline constexpr int kFormatVersion = 1;

/// printf %.12g.
std::string format12(double x);

/// {"format_version": 1, "items": [{"tag", "kind", "bounds": [lo, hi]}]};
/// infinite values are the strings "-inf" and "+inf".
std::string division_to_json(const gauge::Division1D& d);
/// Throws InvalidArgument on schema violations, AssociationError when a tag
/// does not belong to its cell.
gauge::Division1D division_from_json(const std::string& text);

std::string validity_to_json(const gauge::ValidityReport& report);
std::string integration_to_json(const integrate::IntegrationReport& report);

/// {"times": [...], "origin_time": t0, "origin_point": x0}; throws ScheduleError.
fresnel::IncrementSchedule schedule_from_json(const std::string& text);

/// "zero", "const:c" or "harmonic:omega"; throws InvalidArgument.
pathint::Potential parse_potential(const std::string& text);
std::string potential_to_string(const pathint::Potential& v);

/// {"xi_start", "tau_start", "xi_end", "tau_end", "slices", "potential",
/// "slice_times"}; missing keys keep their defaults.
pathint::PropagatorQuery query_from_json(const std::string& text);

/// Each table starts with the line "# format_version 1" and a header row.
std::string fresnel_csv(std::span<const fresnel::FresnelRow> rows);
std::string kernel_csv(std::span<const pathint::KernelRow> rows);
std::string growth_csv(const exchange::GrowthTable& table);
std::string probe_csv(const exchange::BetaProbe& probe);
std::string comparison_csv(std::span<const exchange::ComparisonRow> rows);

/// {"format_version", "beta_probe", "m_found", "eps", "max_ratio", "samples"}.
std::string verdict_json(const exchange::ConvergenceWitness& w, double eps);

}  // namespace hkpath::serialize
