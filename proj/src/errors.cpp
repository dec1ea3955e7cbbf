#include "toolgate/errors.hpp"

namespace toolgate {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::RemoteUnavailable: return "RemoteUnavailable";
        case ErrorCode::DuplicateToolId: return "DuplicateToolId";
        case ErrorCode::UnknownToolId: return "UnknownToolId";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::SchemaVersionMismatch: return "SchemaVersionMismatch";
        case ErrorCode::CorruptIndex: return "CorruptIndex";
        case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
        case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
        case ErrorCode::UnparsableGeneration: return "UnparsableGeneration";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::NoJsonFound: return "NoJsonFound";
        case ErrorCode::EmptyToolList: return "EmptyToolList";
        case ErrorCode::MalformedEntry: return "MalformedEntry";
        case ErrorCode::RecommenderFailed: return "RecommenderFailed";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::HttpError: return "HttpError";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::ScriptExhausted: return "ScriptExhausted";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::UnknownGoldTool: return "UnknownGoldTool";
        case ErrorCode::NonMonotoneTimestamps: return "NonMonotoneTimestamps";
        case ErrorCode::QuerySetMismatch: return "QuerySetMismatch";
        case ErrorCode::MissingBaselineMetric: return "MissingBaselineMetric";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

}  // namespace toolgate
