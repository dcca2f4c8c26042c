#pragma once

#include <stdexcept>
#include <string>

namespace salrate {

/// Typed failure categories shared by the whole toolkit. The CLI prints the
/// enumerator name verbatim, so names are part of the external interface.
enum class ErrorCode {
  // file formats
  MALFORMED_HEADER,
  TRUNCATED_FRAME,
  UNSUPPORTED_COLORSPACE,
  IO_FAILURE,
  TRUNCATED_PAYLOAD,
  MISSING_HEADER,
  BAD_ROW,
  VERSION_MISMATCH,
  DIMENSION_MISMATCH,
  EMPTY_FILE,
  // saliency and metrics
  UNKNOWN_OBSERVER,
  EMPTY_MAP,
  DEGENERATE_MAP,
  NO_FIXATIONS,
  // postprocess
  EMPTY_TRAINING_SET,
  // quantizer solving and coding
  OUT_OF_RANGE,
  PROBE_FAILURE,
  CORRUPT_BITSTREAM,
  TARGET_UNREACHABLE,
  // ranking
  EMPTY_INPUT,
  DISCONNECTED_GRAPH,
  MISSING_PAIR,
  // configuration
  BAD_CONFIG,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace salrate
