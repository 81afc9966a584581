#include "error.hpp"

namespace sculptor {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::Parameter: return "parameter error";
    case ErrorCode::Model: return "model-construction error";
    case ErrorCode::Dimension: return "dimension mismatch";
    case ErrorCode::Abundance: return "abundance error";
    case ErrorCode::Weight: return "weight error";
    case ErrorCode::Evaluation: return "evaluation error";
    case ErrorCode::Calibration: return "calibration error";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Config: return "configuration error";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

}  // namespace sculptor
