#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace genprobe {

/// Failure kinds raised by the toolkit. Grouped into usage/spec errors and
/// data errors so the command line can map them onto its exit codes.
enum class ErrorCode {
  // usage / specification
  usage,
  spec_invalid,
  axis_mismatch,
  space_mismatch,
  bad_support_size,
  size_out_of_range,
  count_too_large,
  too_few_configs,
  // data
  empty_sample,
  domain_mismatch,
  degenerate_histogram,
  degenerate_labels,
  placement_exhausted,
  bad_magic,
  truncated_payload,
  empty_support,
  empty_class_pool,
  empty_references,
  bad_shape,
  no_foreground,
  empty_directory,
  empty_manifest,
  support_too_large,
  io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return "Usage";
    case ErrorCode::spec_invalid: return "SpecInvalid";
    case ErrorCode::axis_mismatch: return "AxisMismatch";
    case ErrorCode::space_mismatch: return "SpaceMismatch";
    case ErrorCode::bad_support_size: return "BadSupportSize";
    case ErrorCode::size_out_of_range: return "SizeOutOfRange";
    case ErrorCode::count_too_large: return "CountTooLarge";
    case ErrorCode::too_few_configs: return "TooFewConfigs";
    case ErrorCode::empty_sample: return "EmptySample";
    case ErrorCode::domain_mismatch: return "DomainMismatch";
    case ErrorCode::degenerate_histogram: return "DegenerateHistogram";
    case ErrorCode::degenerate_labels: return "DegenerateLabels";
    case ErrorCode::placement_exhausted: return "PlacementExhausted";
    case ErrorCode::bad_magic: return "BadMagic";
    case ErrorCode::truncated_payload: return "TruncatedPayload";
    case ErrorCode::empty_support: return "EmptySupport";
    case ErrorCode::empty_class_pool: return "EmptyClassPool";
    case ErrorCode::empty_references: return "EmptyReferences";
    case ErrorCode::bad_shape: return "BadShape";
    case ErrorCode::no_foreground: return "NoForeground";
    case ErrorCode::empty_directory: return "EmptyDirectory";
    case ErrorCode::empty_manifest: return "EmptyManifest";
    case ErrorCode::support_too_large: return "SupportTooLarge";
    case ErrorCode::io: return "IoError";
  }
  return "Unknown";
}

/// True for errors caused by the caller's request rather than by input data.
constexpr bool is_usage_error(ErrorCode code) {
  return code <= ErrorCode::too_few_configs;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace genprobe
