#include "salrate/error.hpp"

namespace salrate {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MALFORMED_HEADER: return "MALFORMED_HEADER";
    case ErrorCode::TRUNCATED_FRAME: return "TRUNCATED_FRAME";
    case ErrorCode::UNSUPPORTED_COLORSPACE: return "UNSUPPORTED_COLORSPACE";
    case ErrorCode::IO_FAILURE: return "IO_FAILURE";
    case ErrorCode::TRUNCATED_PAYLOAD: return "TRUNCATED_PAYLOAD";
    case ErrorCode::MISSING_HEADER: return "MISSING_HEADER";
    case ErrorCode::BAD_ROW: return "BAD_ROW";
    case ErrorCode::VERSION_MISMATCH: return "VERSION_MISMATCH";
    case ErrorCode::DIMENSION_MISMATCH: return "DIMENSION_MISMATCH";
    case ErrorCode::EMPTY_FILE: return "EMPTY_FILE";
    case ErrorCode::UNKNOWN_OBSERVER: return "UNKNOWN_OBSERVER";
    case ErrorCode::EMPTY_MAP: return "EMPTY_MAP";
    case ErrorCode::DEGENERATE_MAP: return "DEGENERATE_MAP";
    case ErrorCode::NO_FIXATIONS: return "NO_FIXATIONS";
    case ErrorCode::EMPTY_TRAINING_SET: return "EMPTY_TRAINING_SET";
    case ErrorCode::OUT_OF_RANGE: return "OUT_OF_RANGE";
    case ErrorCode::PROBE_FAILURE: return "PROBE_FAILURE";
    case ErrorCode::CORRUPT_BITSTREAM: return "CORRUPT_BITSTREAM";
    case ErrorCode::TARGET_UNREACHABLE: return "TARGET_UNREACHABLE";
    case ErrorCode::EMPTY_INPUT: return "EMPTY_INPUT";
    case ErrorCode::DISCONNECTED_GRAPH: return "DISCONNECTED_GRAPH";
    case ErrorCode::MISSING_PAIR: return "MISSING_PAIR";
    case ErrorCode::BAD_CONFIG: return "BAD_CONFIG";
  }
  return "UNKNOWN_ERROR";
}

}  // namespace salrate
