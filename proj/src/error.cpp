#include "arcjet/error.hpp"

namespace arcjet {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DecodeFailure: return "DecodeFailure";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::RoiOutOfBounds: return "RoiOutOfBounds";
    case ErrorCode::EmptyRangeList: return "EmptyRangeList";
    case ErrorCode::EmptyRange: return "EmptyRange";
    case ErrorCode::NothingSegmented: return "NothingSegmented";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::NoOnRegion: return "NoOnRegion";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingEdge: return "MissingEdge";
    case ErrorCode::NoKeptFrames: return "NoKeptFrames";
    case ErrorCode::InconsistentDimensions: return "InconsistentDimensions";
    case ErrorCode::DegenerateAbscissa: return "DegenerateAbscissa";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::PluginMissing: return "PluginMissing";
  }
  return "Unknown";
}

}  // namespace arcjet
