#pragma once

// Human-friendly LLMON syntax: `\tag\ content /tag/`, `\tag/`, with `\\`
// and `\/` as the only escapes.

#include <string>
#include <string_view>
#include <vector>

#include "llmon/model.hpp"
#include "llmon/syntax.hpp"

namespace llmon {

using SurfaceToken = SyntaxToken;

/// Splits surface text into grammar terminals. `:` is a colon separator only
/// as the first colon directly inside an object item; `,` is a list
/// separator only directly inside a list. Everything else is scalar text.
/// Throws Error(UnterminatedTag | BadEscape).
std::vector<SurfaceToken> lex_surface(std::string_view input);

Document parse_surface(std::string_view input, const ParseOptions& options = {},
                       std::vector<ParseWarning>* warnings = nullptr);

/// Parses and reports how many terminals were consumed; a predictive parse
/// consumes every terminal exactly once.
Document parse_surface_counted(std::string_view input, std::size_t& tokens_lexed,
                               std::size_t& tokens_consumed, const ParseOptions& options = {});

std::string print_surface(const Document& doc, const PrintOptions& options = {});

/// Escapes `\` and `/` for use as surface scalar text.
std::string escape_surface_text(std::string_view raw);

/// Re-encodes a terminal exactly as it would appear in surface text.
std::string encode_surface_token(const SurfaceToken& token);

}  // namespace llmon
