#pragma once

#include <stdexcept>
#include <string>

namespace matmoment {

enum class Errc {
  kDimensionMismatch,
  kInvalidInput,
  kNotConverged,
  kCommutatorTooLarge,
  kNotRepresenting,
  kInsufficientDegree,
  kNotPositive,
  kNotFlat,
  kNonCommutingShifts,
  kDegenerateEigenvalues,
  kResidualTooLarge,
  kMissingUnit,
  kZeroMatrix,
  kZeroFunctional,
  kNotInCoreSet,
  kIterationBoundExceeded,
  kHypothesisViolated,
  kNoMeasureProvided,
  kNegativeWeight,
  kUnknownPoint,
  kNotALift,
  kMissingCoordinates,
  kIo,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace matmoment
