#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace llmon {

enum class ErrorCode {
  // tag paths
  InvalidTagText,
  EmptySegment,
  // lexing / parsing
  UnterminatedTag,
  BadEscape,
  MismatchedCloseTag,
  UnexpectedToken,
  UnclosedTag,
  DepthExceeded,
  BadCastValue,
  // printing / conversion
  UnrepresentableScalar,
  FlattenConflict,
  InvalidJson,
  UntranslatableNode,
  // registry
  InvalidRegistry,
  // masking
  SpanNotInIndex,
  UnknownReference,
  InvalidPolicy,
  DimensionMismatch,
  // data generation
  PoolTooSmall,
  InvalidRecord,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error. Carries a stable code plus, where meaningful, the byte
/// offset into the input (surface syntax, JSON) or the token index (machine
/// syntax) at which the problem was detected.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<std::size_t> byte_offset = std::nullopt,
        std::optional<std::size_t> token_index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }
  std::optional<std::size_t> token_index() const noexcept { return token_index_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<std::size_t> byte_offset_;
  std::optional<std::size_t> token_index_;
};

}  // namespace llmon
