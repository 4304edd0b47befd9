#pragma once

// Machine form of LLMON: structure is carried by atomic special tokens
// (`<|open|>tag<|close|>`), so scalar text needs no escaping.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmon/model.hpp"
#include "llmon/syntax.hpp"

namespace llmon {

enum class SpecialRole { Open, OpenEnd, Close, SelfClose, Dot, Colon, ListSeparator };

inline constexpr std::size_t kSpecialRoleCount = 7;

/// Default spelling of each role.
std::string_view default_special_text(SpecialRole role) noexcept;

/// Ordinary token ids live above this base so they never collide with
/// special-token ids, which must be below it.
inline constexpr std::uint64_t kOrdinaryIdBase = std::uint64_t{1} << 32;

/// FNV-1a (32-bit) of `text`, offset into the ordinary id range.
std::uint64_t ordinary_token_id(std::string_view text) noexcept;

class SpecialTokenRegistry {
 public:
  struct Entry {
    std::string text;
    std::uint64_t id = 0;
    std::optional<SpecialRole> role;
  };

  /// The seven role strings with ids 0..6.
  SpecialTokenRegistry();

  /// Reads `{"<|open|>": 0, ...}`. Every role string must be present; extra
  /// strings are registered as role-less specials. Throws Error(InvalidRegistry).
  static SpecialTokenRegistry from_json(std::string_view json);
  std::string to_json() const;

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::string& text(SpecialRole role) const;
  std::uint64_t id(SpecialRole role) const;
  const Entry* find(std::string_view text) const noexcept;

  /// Longest special string starting at `pos`, or nullptr.
  const Entry* match_at(std::string_view input, std::size_t pos) const noexcept;

  /// Construction-time diagnostics (e.g. one special is a substring of another).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// First role string occurring in `text`, if any.
  std::optional<SpecialRole> find_role_string(std::string_view text) const noexcept;

 private:
  void finalize();

  std::vector<Entry> entries_;
  // Entry indices sorted by descending text length, for longest match.
  std::vector<std::size_t> by_length_;
  std::size_t role_index_[kSpecialRoleCount] = {};
  std::vector<std::string> warnings_;
};

const SpecialTokenRegistry& default_registry();

struct Token {
  std::uint64_t id = 0;
  std::string text;
  bool is_special = false;
  ByteRange bytes;
};

/// Segments text between special tokens. Implementations must cover their
/// input exactly (concatenated token texts equal the input).
class OrdinaryTokenizer {
 public:
  virtual ~OrdinaryTokenizer() = default;
  virtual void split(std::string_view text, std::size_t byte_base, std::vector<Token>& out) const = 0;
};

/// One token per maximal whitespace run and per maximal non-whitespace run.
class DeskTokenizer final : public OrdinaryTokenizer {
 public:
  void split(std::string_view text, std::size_t byte_base, std::vector<Token>& out) const override;
};

/// Greedy left-to-right longest match on special strings; the remaining
/// text goes through `ordinary` (desk rule by default). Total and exact.
std::vector<Token> tokenize(std::string_view input, const SpecialTokenRegistry& registry = default_registry(),
                            const OrdinaryTokenizer* ordinary = nullptr);

std::string detokenize(const std::vector<Token>& tokens);

struct TokenSequence {
  std::vector<Token> tokens;
  /// Indexed by NodeId: inclusive token range covering the node's
  /// delimiters and content.
  std::vector<TokenRange> span_index;

  std::optional<TokenRange> span(NodeId id) const;
};

struct ParsedMachine {
  Document document;
  TokenSequence tokens;
};

/// Maps raw tokens to grammar terminals. Throws Error with token indices.
std::vector<SyntaxToken> lex_machine(const std::vector<Token>& tokens, std::size_t input_size,
                                     const SpecialTokenRegistry& registry = default_registry());

ParsedMachine parse_machine(std::string_view input, const SpecialTokenRegistry& registry = default_registry(),
                            const ParseOptions& options = {}, std::vector<ParseWarning>* warnings = nullptr);

/// Like parse_machine, also reporting terminals lexed and consumed.
ParsedMachine parse_machine_counted(std::string_view input, std::size_t& terminals_lexed,
                                    std::size_t& terminals_consumed,
                                    const SpecialTokenRegistry& registry = default_registry(),
                                    const ParseOptions& options = {});

/// Throws Error(UnrepresentableScalar) when text contains a role string.
std::string print_machine(const Document& doc, const SpecialTokenRegistry& registry = default_registry(),
                          const PrintOptions& options = {});

/// Canonical whitespace for comparing machine text: whitespace next to a
/// special token is dropped, other whitespace runs become one space.
std::string normalize_machine_whitespace(std::string_view text,
                                         const SpecialTokenRegistry& registry = default_registry());

}  // namespace llmon
