#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dalk {

enum class ErrorCode {
  // Input / data errors.
  MalformedLine,
  OffsetOutOfRange,
  MentionMismatch,
  DuplicateDocId,
  MissingYear,
  MalformedRow,
  InvalidSample,
  ConfigError,
  EmptyInput,
  // Provider errors.
  CacheMiss,
  TransportError,
  RateLimited,
  UnmatchedPrompt,
  BatchAborted,
  // Algorithmic precondition errors.
  DimensionMismatch,
  ZeroVector,
  EmptyGraph,
  UnknownNode,
  UnknownSeed,
  TooFewEntities,
  EmptySubgraph,
  PreconditionViolation,
};

std::string_view to_string(ErrorCode code);

// Broad class of an error, used by the command line tool to pick exit codes.
enum class ErrorClass { Input, Provider, Internal };

ErrorClass classify(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dalk
