#ifndef VOXMARK_ERROR_HPP
#define VOXMARK_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace voxmark {

enum class ErrorCode {
  MalformedContainer,
  UnsupportedFormat,
  EmptyAudio,
  SignalTooShort,
  InvalidFftSize,
  InvalidRange,
  InvalidBandConfig,
  TooFewFrames,
  InvalidOrder,
  MalformedConllu,
  EmptyLexicon,
  DimensionMismatch,
  EmptyFile,
  TooFewColumns,
  InvalidK,
  ConvergenceFailure,
  NotClassification,
  DegenerateClasses,
  InvalidArgument,
  NoInputs,
  UnwritableOutput,
  SchemaError,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedContainer: return "MalformedContainer";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::InvalidFftSize: return "InvalidFftSize";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidBandConfig: return "InvalidBandConfig";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::MalformedConllu: return "MalformedConllu";
    case ErrorCode::EmptyLexicon: return "EmptyLexicon";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::TooFewColumns: return "TooFewColumns";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotClassification: return "NotClassification";
    case ErrorCode::DegenerateClasses: return "DegenerateClasses";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoInputs: return "NoInputs";
    case ErrorCode::UnwritableOutput: return "UnwritableOutput";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace voxmark

#endif  // VOXMARK_ERROR_HPP
