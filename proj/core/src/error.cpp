#include "dalk/error.hpp"

namespace dalk {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::OffsetOutOfRange: return "OffsetOutOfRange";
    case ErrorCode::MentionMismatch: return "MentionMismatch";
    case ErrorCode::DuplicateDocId: return "DuplicateDocId";
    case ErrorCode::MissingYear: return "MissingYear";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::CacheMiss: return "CacheMiss";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::UnmatchedPrompt: return "UnmatchedPrompt";
    case ErrorCode::BatchAborted: return "BatchAborted";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownSeed: return "UnknownSeed";
    case ErrorCode::TooFewEntities: return "TooFewEntities";
    case ErrorCode::EmptySubgraph: return "EmptySubgraph";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
  }
  return "Unknown";
}

ErrorClass classify(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLine:
    case ErrorCode::OffsetOutOfRange:
    case ErrorCode::MentionMismatch:
    case ErrorCode::DuplicateDocId:
    case ErrorCode::MissingYear:
    case ErrorCode::MalformedRow:
    case ErrorCode::InvalidSample:
    case ErrorCode::ConfigError:
    case ErrorCode::EmptyInput:
      return ErrorClass::Input;
    case ErrorCode::CacheMiss:
    case ErrorCode::TransportError:
    case ErrorCode::RateLimited:
    case ErrorCode::UnmatchedPrompt:
    case ErrorCode::BatchAborted:
      return ErrorClass::Provider;
    default:
      return ErrorClass::Internal;
  }
}

}  // namespace dalk
