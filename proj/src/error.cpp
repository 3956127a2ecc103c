#include "mbio/error.hpp"

namespace mbio {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingFile: return "missing-file";
        case ErrorCode::UnsupportedFormat: return "unsupported-format";
        case ErrorCode::ZeroDimension: return "zero-dimension";
        case ErrorCode::Io: return "io";
        case ErrorCode::VersionMismatch: return "version-mismatch";
        case ErrorCode::Truncated: return "truncated";
        case ErrorCode::ChecksumFailure: return "checksum-failure";
        case ErrorCode::Dimension: return "dimension";
        case ErrorCode::Contract: return "contract";
        case ErrorCode::Calibration: return "calibration";
        case ErrorCode::Config: return "config";
        case ErrorCode::InsufficientSamples: return "insufficient-samples";
        case ErrorCode::DatasetTooSmall: return "dataset-too-small";
        case ErrorCode::FrameOutsideImage: return "frame-outside-image";
        case ErrorCode::NoAlignment: return "no-alignment";
        case ErrorCode::PupilNotFound: return "pupil-not-found";
        case ErrorCode::UnwrapFailed: return "unwrap-failed";
        case ErrorCode::Incomparable: return "incomparable";
        case ErrorCode::StageFailure: return "stage-failure";
    }
    return "unknown";
}

bool is_pipeline_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::FrameOutsideImage:
        case ErrorCode::NoAlignment:
        case ErrorCode::PupilNotFound:
        case ErrorCode::UnwrapFailed:
        case ErrorCode::Incomparable:
        case ErrorCode::StageFailure:
            return true;
        default:
            return false;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace mbio
