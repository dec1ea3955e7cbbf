#pragma once

#include <stdexcept>
#include <string>

namespace toolgate {

enum class ErrorCode {
    // embedding
    EmptyText,
    DimensionMismatch,
    ZeroVector,
    RemoteUnavailable,
    // index / clustering
    DuplicateToolId,
    UnknownToolId,
    EmptyInput,
    IoFailure,
    SchemaVersionMismatch,
    CorruptIndex,
    FingerprintMismatch,
    // augmentation
    EmptyTrainingSet,
    UnparsableGeneration,
    // recommender
    EmptyQuery,
    NoJsonFound,
    EmptyToolList,
    MalformedEntry,
    RecommenderFailed,
    // controller
    EmptyIndex,
    // llm client
    Unreachable,
    HttpError,
    ProtocolError,
    Timeout,
    ScriptExhausted,
    // bench harness
    SchemaError,
    UnknownGoldTool,
    NonMonotoneTimestamps,
    QuerySetMismatch,
    MissingBaselineMetric,
    // generic precondition violation
    InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace toolgate
