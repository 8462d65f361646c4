#include "solrad/error.hpp"

namespace solrad {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kLowSun: return "low-sun";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kMissingSlot: return "missing-slot";
    case ErrorCode::kDegenerateFit: return "degenerate-fit";
    case ErrorCode::kDegenerateDesign: return "degenerate-design";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kNoViableCandidate: return "no-viable-candidate";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kPairing: return "pairing";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace solrad
