#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmm {

enum class ErrorCode {
  malformed_file,
  unsupported_division,
  empty_melody,
  syntax_error,
  range_error,
  too_short,
  invalid_params,
  empty_clip,
  empty_input,
  empty_matching,
  invalid_order,
  both_empty,
  all_zero_weights,
  no_valid_shift,
  insufficient_corpus,
  unsupported_type,
  unknown_detector,
  empty_list,
  missing_file,
  io_error,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::malformed_file: return "MalformedFile";
    case ErrorCode::unsupported_division: return "UnsupportedDivision";
    case ErrorCode::empty_melody: return "EmptyMelody";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::range_error: return "RangeError";
    case ErrorCode::too_short: return "TooShort";
    case ErrorCode::invalid_params: return "InvalidParams";
    case ErrorCode::empty_clip: return "EmptyClip";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::empty_matching: return "EmptyMatching";
    case ErrorCode::invalid_order: return "InvalidOrder";
    case ErrorCode::both_empty: return "BothEmpty";
    case ErrorCode::all_zero_weights: return "AllZeroWeights";
    case ErrorCode::no_valid_shift: return "NoValidShift";
    case ErrorCode::insufficient_corpus: return "InsufficientCorpus";
    case ErrorCode::unsupported_type: return "UnsupportedType";
    case ErrorCode::unknown_detector: return "UnknownDetector";
    case ErrorCode::empty_list: return "EmptyList";
    case ErrorCode::missing_file: return "MissingFile";
    case ErrorCode::io_error: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above, so
/// callers (the CLI in particular) can map failures to exit codes without
/// parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bmm
