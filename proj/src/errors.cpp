#include "losslim/errors.hpp"

namespace losslim {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NoStabilizingSolution: return "NoStabilizingSolution";
    case ErrorCode::NonzeroFeedthrough: return "NonzeroFeedthrough";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::NotLossless: return "NotLossless";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotUnique: return "NotUnique";
    case ErrorCode::SkewFeedthroughViolated: return "SkewFeedthroughViolated";
    case ErrorCode::NegativeTrace: return "NegativeTrace";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IllPosedLoop: return "IllPosedLoop";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::LoadAngleOutOfRange: return "LoadAngleOutOfRange";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::SingularInternalBlock: return "SingularInternalBlock";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NullspaceMismatch: return "NullspaceMismatch";
    case ErrorCode::NonpositiveInertia: return "NonpositiveInertia";
    case ErrorCode::MissingRatedPower: return "MissingRatedPower";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::InfeasibleSizing: return "InfeasibleSizing";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

int exit_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return 1;
    case ErrorCode::NotLossless:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::NotUnique:
    case ErrorCode::SkewFeedthroughViolated:
    case ErrorCode::NegativeTrace:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonzeroFeedthrough:
    case ErrorCode::NotHurwitz:
    case ErrorCode::Disconnected:
    case ErrorCode::LoadAngleOutOfRange:
    case ErrorCode::NonpositiveWeight:
    case ErrorCode::NonpositiveInertia:
    case ErrorCode::MissingRatedPower:
    case ErrorCode::NotConnected:
    case ErrorCode::IllPosedLoop:
      return 2;
    default:
      return 3;
  }
}

}  // namespace losslim
