/**
 * @file error.hpp
 * @brief Error type shared by every module.
 *
 * Each failure carries a code; the CLI maps codes onto process exit codes
 * (data errors exit 2, pipeline failures exit 3).
 */
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbio {

enum class ErrorCode {
    // data / I/O
    MissingFile,
    UnsupportedFormat,
    ZeroDimension,
    Io,
    VersionMismatch,
    Truncated,
    ChecksumFailure,
    Dimension,
    Contract,
    Calibration,
    Config,
    InsufficientSamples,
    DatasetTooSmall,
    // pipeline
    FrameOutsideImage,
    NoAlignment,
    PupilNotFound,
    UnwrapFailed,
    Incomparable,
    StageFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of a processing stage (as opposed to bad input data).
bool is_pipeline_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mbio
