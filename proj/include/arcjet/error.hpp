#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arcjet {

enum class ErrorCode {
  // frames
  MissingManifest,
  MalformedManifest,
  DimensionMismatch,
  IndexOutOfRange,
  DecodeFailure,
  ConfigInvalid,
  IoFailure,
  // colorseg / edges
  RoiOutOfBounds,
  EmptyRangeList,
  EmptyRange,
  NothingSegmented,
  // timeseg
  EmptySource,
  WrongLength,
  NonFiniteInput,
  DivergedLoss,
  NoOnRegion,
  SchemaMismatch,
  // outliers
  DegenerateInput,
  NonFinite,
  // analysis
  MissingEdge,
  NoKeptFrames,
  InconsistentDimensions,
  DegenerateAbscissa,
  // pipeline
  UsageError,
  PluginMissing,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception; `code()` identifies the failure for callers that
/// branch on it (CLI exit codes, HTTP status mapping).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace arcjet
