#include "llmon/error.hpp"

namespace llmon {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidTagText: return "InvalidTagText";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::UnterminatedTag: return "UnterminatedTag";
    case ErrorCode::BadEscape: return "BadEscape";
    case ErrorCode::MismatchedCloseTag: return "MismatchedCloseTag";
    case ErrorCode::UnexpectedToken: return "UnexpectedToken";
    case ErrorCode::UnclosedTag: return "UnclosedTag";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::BadCastValue: return "BadCastValue";
    case ErrorCode::UnrepresentableScalar: return "UnrepresentableScalar";
    case ErrorCode::FlattenConflict: return "FlattenConflict";
    case ErrorCode::InvalidJson: return "InvalidJson";
    case ErrorCode::UntranslatableNode: return "UntranslatableNode";
    case ErrorCode::InvalidRegistry: return "InvalidRegistry";
    case ErrorCode::SpanNotInIndex: return "SpanNotInIndex";
    case ErrorCode::UnknownReference: return "UnknownReference";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_what(ErrorCode code, const std::string& message,
                        std::optional<std::size_t> byte_offset,
                        std::optional<std::size_t> token_index) {
  std::string out(to_string(code));
  if (byte_offset) out += " at byte " + std::to_string(*byte_offset);
  if (token_index) out += " at token " + std::to_string(*token_index);
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string message,
             std::optional<std::size_t> byte_offset,
             std::optional<std::size_t> token_index)
    : std::runtime_error(format_what(code, message, byte_offset, token_index)),
      code_(code),
      message_(std::move(message)),
      byte_offset_(byte_offset),
      token_index_(token_index) {}

}  // namespace llmon
