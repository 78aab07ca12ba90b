#include "fedhc/errors.hpp"

namespace fedhc {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::AllZeroSizes: return "AllZeroSizes";
        case ErrorCode::NonPositiveLoss: return "NonPositiveLoss";
        case ErrorCode::EmptyTaskList: return "EmptyTaskList";
        case ErrorCode::ZeroFrequency: return "ZeroFrequency";
        case ErrorCode::ZeroRate: return "ZeroRate";
        case ErrorCode::InvalidWeight: return "InvalidWeight";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::CountMismatch: return "CountMismatch";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::NoVisiblePS: return "NoVisiblePS";
        case ErrorCode::UnknownSatellite: return "UnknownSatellite";
        case ErrorCode::DuplicateJoin: return "DuplicateJoin";
        case ErrorCode::MissingMetrics: return "MissingMetrics";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

} // namespace fedhc
