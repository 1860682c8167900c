#pragma once

#include <stdexcept>
#include <string>

namespace losslim {

// Every failure mode the library reports. The CLI maps these onto its
// exit-code contract (see exit_class).
enum class ErrorCode {
  // numlin
  NotHurwitz,
  IllConditioned,
  NoStabilizingSolution,
  NonzeroFeedthrough,
  BracketFailure,
  // lossless
  NotLossless,
  NotPositiveDefinite,
  NotUnique,
  SkewFeedthroughViolated,
  NegativeTrace,
  DimensionMismatch,
  // synth
  IllPosedLoop,
  // swing
  Disconnected,
  LoadAngleOutOfRange,
  NonpositiveWeight,
  SingularInternalBlock,
  RankDeficient,
  NullspaceMismatch,
  NonpositiveInertia,
  // netgen
  MissingRatedPower,
  NotConnected,
  InfeasibleSizing,
  // io
  IoError,
  ParseError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_name(ErrorCode code);

// CLI exit classes: 0 success, 1 I/O or parse, 2 model-class violation,
// 3 numerical failure.
int exit_class(ErrorCode code);

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace losslim
