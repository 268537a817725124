#pragma once

// The acceptance suite, shared by the ctest binary and `hkpath selftest`.

#include <cstdint>
#include <string>
#include <vector>

namespace hkpath::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;
};

inline constexpr int kCriteria = 8;

/// Runs criterion 1..8; a criterion also fails when it exceeds its time limit.
CriterionResult run_criterion(int id, std::uint64_t seed = 20240601);

std::vector<CriterionResult> run_all(std::uint64_t seed = 20240601);

/// "PASS  3  free propagator  (1.2 s)  detail".
std::string format_line(const CriterionResult& r);

}  // namespace hkpath::acceptance
