#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace barrier_walk {

enum class ErrorCode {
    BarrierSum,
    EdgeParam,
    DanglingReference,
    Structure,
    InvalidStart,
    IsolatedBarrier,
    UnknownEdge,
    SingularSystem,
    InternalConsistency,
    Drift,
    InfiniteTime,
    Config,
    Parse,
    UnknownDemo,
    Unsupported,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::BarrierSum: return "BarrierSumError";
    case ErrorCode::EdgeParam: return "EdgeParamError";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::Structure: return "StructureError";
    case ErrorCode::InvalidStart: return "InvalidStart";
    case ErrorCode::IsolatedBarrier: return "IsolatedBarrier";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InternalConsistency: return "InternalConsistency";
    case ErrorCode::Drift: return "DriftError";
    case ErrorCode::InfiniteTime: return "InfiniteTime";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::UnknownDemo: return "UnknownDemo";
    case ErrorCode::Unsupported: return "Unsupported";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace barrier_walk
