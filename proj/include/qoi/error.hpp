#pragma once

#include <stdexcept>
#include <string>

namespace qoi {

enum class ErrorCode {
    parse_error,
    dimension_mismatch,
    non_finite_feature,
    empty_batch,
    missing_flags,
    train_error,
    singular_covariance,
    degenerate_centroids,
    config_error,
    io_error,
    usage_error,
    mismatched_reports,
};

const char* to_string(ErrorCode code);

class QoiError : public std::runtime_error {
public:
    QoiError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw QoiError(code, message);
}

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::dimension_mismatch: return "DimensionMismatch";
        case ErrorCode::non_finite_feature: return "NonFiniteFeature";
        case ErrorCode::empty_batch: return "EmptyBatch";
        case ErrorCode::missing_flags: return "MissingFlags";
        case ErrorCode::train_error: return "TrainError";
        case ErrorCode::singular_covariance: return "SingularCovariance";
        case ErrorCode::degenerate_centroids: return "DegenerateCentroids";
        case ErrorCode::config_error: return "ConfigError";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::usage_error: return "UsageError";
        case ErrorCode::mismatched_reports: return "MismatchedReports";
    }
    return "UnknownError";
}

}  // namespace qoi
