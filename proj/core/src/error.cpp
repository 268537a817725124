#include "hkpath/error.hpp"

namespace hkpath {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::ResourceLimit: return "RESOURCE_LIMIT";
    case ErrorCode::IntegrandError: return "INTEGRAND_ERROR";
    case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::DimensionCap: return "DIMENSION_CAP";
    case ErrorCode::AssociationError: return "ASSOCIATION_ERROR";
    case ErrorCode::ScheduleError: return "SCHEDULE_ERROR";
    case ErrorCode::GridTooCoarse: return "GRID_TOO_COARSE";
    case ErrorCode::NoMFound: return "NO_M_FOUND";
    case ErrorCode::ConfigError: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hkpath
