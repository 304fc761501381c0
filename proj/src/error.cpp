#include "matmoment/error.hpp"

namespace matmoment {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kInvalidInput: return "InvalidInput";
    case Errc::kNotConverged: return "NotConverged";
    case Errc::kCommutatorTooLarge: return "CommutatorTooLarge";
    case Errc::kNotRepresenting: return "NotRepresenting";
    case Errc::kInsufficientDegree: return "InsufficientDegree";
    case Errc::kNotPositive: return "NotPositive";
    case Errc::kNotFlat: return "NotFlat";
    case Errc::kNonCommutingShifts: return "NonCommutingShifts";
    case Errc::kDegenerateEigenvalues: return "DegenerateEigenvalues";
    case Errc::kResidualTooLarge: return "ResidualTooLarge";
    case Errc::kMissingUnit: return "MissingUnit";
    case Errc::kZeroMatrix: return "ZeroMatrix";
    case Errc::kZeroFunctional: return "ZeroFunctional";
    case Errc::kNotInCoreSet: return "NotInCoreSet";
    case Errc::kIterationBoundExceeded: return "IterationBoundExceeded";
    case Errc::kHypothesisViolated: return "HypothesisViolated";
    case Errc::kNoMeasureProvided: return "NoMeasureProvided";
    case Errc::kNegativeWeight: return "NegativeWeight";
    case Errc::kUnknownPoint: return "UnknownPoint";
    case Errc::kNotALift: return "NotALift";
    case Errc::kMissingCoordinates: return "MissingCoordinates";
    case Errc::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace matmoment
