#include "dter/error.hpp"

namespace dter {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InfiniteChargeTime: return "InfiniteChargeTime";
    case ErrorCode::NegativeResidual: return "NegativeResidual";
    case ErrorCode::PacketExceedsBuffer: return "PacketExceedsBuffer";
    case ErrorCode::InfeasibleTunnel: return "InfeasibleTunnel";
    case ErrorCode::SlopeExceedsChargeBound: return "SlopeExceedsChargeBound";
    case ErrorCode::DensityTooLow: return "DensityTooLow";
    case ErrorCode::NoFeasiblePath: return "NoFeasiblePath";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::PowerAtOrAboveBound: return "PowerAtOrAboveBound";
    case ErrorCode::InfeasibleOnline: return "InfeasibleOnline";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

}  // namespace dter
