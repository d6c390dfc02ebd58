#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polyvol {

// Every domain failure carries one of these codes; the CLI prints it verbatim
// as `ERR <code> <detail>`.
enum class ErrorCode {
  PoleNotHyperideal,
  PlanesDisjointInBall,
  PlanesEqual,
  OutsideModel,
  DegenerateDeformation,
  NotPolyhedral,
  CollapseMakesDegenerate,
  AngleOutOfRange,
  SkeletonMismatch,
  NonConvex,
  EdgeMissesBall,
  TooFewAngles,
  ImproperInput,
  NotIdeal,
  QuadratureBudgetExceeded,
  PathDiscontinuous,
  SolverDiverged,
  NewtonDiverged,
  SkeletonChanged,
  MaxEventsExceeded,
  StallDetected,
  NoIdealVertices,
  PropernessLost,
  NoSeparatingPlane,
  ParseError,
};

std::string_view errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(errorCodeName(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace polyvol
