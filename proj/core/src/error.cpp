#include "bsp/error.hpp"

namespace bsp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidPolygon: return "InvalidPolygon";
    case ErrorKind::kCutMisses: return "CutMisses";
    case ErrorKind::kDegenerateCut: return "DegenerateCut";
    case ErrorKind::kQuadratureFailure: return "QuadratureFailure";
    case ErrorKind::kEnvelopeViolation: return "EnvelopeViolation";
    case ErrorKind::kSubdomainNotContained: return "SubdomainNotContained";
    case ErrorKind::kTimeOutOfRange: return "TimeOutOfRange";
    case ErrorKind::kPointOutsideDomain: return "PointOutsideDomain";
    case ErrorKind::kRunawayProcess: return "RunawayProcess";
    case ErrorKind::kAllWeightsZero: return "AllWeightsZero";
    case ErrorKind::kSingleClass: return "SingleClass";
    case ErrorKind::kParse: return "Parse";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace bsp
