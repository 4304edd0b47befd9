#pragma once

// Pieces shared by the surface (`\tag\ ... /tag/`) and machine
// (`<|open|>tag<|close|>`) syntaxes: grammar terminals, parse options and
// print options.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "llmon/model.hpp"

namespace llmon {

enum class TokenKind {
  StartUserTag,
  EndUserTag,
  SelfCloseUserTag,
  StartObjectTag,
  EndObjectTag,
  StartObjectItemTag,
  EndObjectItemTag,
  StartListTag,
  EndListTag,
  ColonSeparator,
  ListSeparator,
  ScalarText,
};

std::string_view to_string(TokenKind kind) noexcept;

/// Inclusive range of raw token indices (machine syntax only).
struct TokenRange {
  std::size_t first = 0;
  std::size_t last = 0;
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

/// A grammar terminal. For tag kinds `text` is the tag text; for
/// ScalarText it is the decoded text (escapes removed).
struct SyntaxToken {
  TokenKind kind = TokenKind::ScalarText;
  std::string text;
  ByteRange bytes;
  TokenRange tokens;
};

struct ParseOptions {
  /// Honor bare `integer`/`float` scalars as typed literals. Off by default:
  /// bare scalars are strings unless cast.
  bool strict_grammar = false;
  /// Downgrade close-tag text mismatches to warnings.
  bool lenient_close_tags = false;
  std::size_t max_depth = 1024;
};

struct ParseWarning {
  std::string message;
  std::size_t byte_offset = 0;
};

enum class PrintStyle { Compact, Indented };

struct PrintOptions {
  PrintStyle style = PrintStyle::Indented;
  /// Spell object items and item-valued lists as `object.item` /
  /// `object.list` instead of `item` / `list`.
  bool flat_structural_names = true;
  const Vocabulary* vocabulary = nullptr;
};

}  // namespace llmon
