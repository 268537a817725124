#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hkpath {

enum class ErrorCode {
  InvalidArgument,
  ResourceLimit,
  IntegrandError,
  NoConvergence,
  DimensionCap,
  AssociationError,
  ScheduleError,
  GridTooCoarse,
  NoMFound,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace hkpath
