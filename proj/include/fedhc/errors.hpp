#pragma once

#include <stdexcept>
#include <string>

namespace fedhc {

// Every failure mode the library reports. The C API maps these to
// coarse status codes; C++ callers can switch on the exact code.
enum class ErrorCode {
    // clustering
    EmptyInput,
    InvalidK,
    EmptyCluster,
    InvalidCount,
    // model / aggregation
    ShapeMismatch,
    AllZeroSizes,
    NonPositiveLoss,
    EmptyTaskList,
    // cost model
    ZeroFrequency,
    ZeroRate,
    InvalidWeight,
    // data loading / partitioning
    BadMagic,
    CountMismatch,
    TruncatedFile,
    TooFewSamples,
    // simulation
    NoVisiblePS,
    UnknownSatellite,
    DuplicateJoin,
    MissingMetrics,
    // config / io
    ConfigError,
    IoError,
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace fedhc
