#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmon/syntax.hpp"

namespace llmon::detail {

struct ParsedTree {
  Document doc;
  /// Indexed by NodeId.
  std::vector<TokenRange> token_spans;
  std::size_t tokens_consumed = 0;
};

/// Predictive (LL(1), no backtracking) parser over grammar terminals.
/// `report_token_index` selects whether errors carry token indices
/// (machine syntax) in addition to byte offsets.
ParsedTree parse_terminals(const std::vector<SyntaxToken>& tokens, std::size_t input_size,
                           const ParseOptions& options, std::vector<ParseWarning>* warnings,
                           bool report_token_index);

/// Classifies an opening tag text into Start{Object,ObjectItem,List,User}Tag.
TokenKind start_kind_for(std::string_view tag_text) noexcept;
TokenKind end_kind_for(std::string_view tag_text) noexcept;

/// Tracks the innermost open tag so lexers know when `:` / `,` act as
/// item and list separators.
class FrameStack {
 public:
  void open(std::string_view tag_text) { frames_.push_back({std::string(tag_text), false}); }
  void close() {
    if (!frames_.empty()) frames_.pop_back();
  }
  /// True when the innermost frame is an object item whose key separator
  /// has not been seen yet; marks it as seen.
  bool take_item_colon() {
    if (frames_.empty() || !is_item_tag_text(frames_.back().text) || frames_.back().colon_seen) {
      return false;
    }
    frames_.back().colon_seen = true;
    return true;
  }
  bool in_list() const { return !frames_.empty() && is_list_tag_text(frames_.back().text); }

 private:
  struct Frame {
    std::string text;
    bool colon_seen;
  };
  std::vector<Frame> frames_;
};

/// Output dialect for the shared pretty printer.
class Dialect {
 public:
  virtual ~Dialect() = default;
  virtual std::string open_tag(std::string_view text) const = 0;
  virtual std::string end_tag(std::string_view text) const = 0;
  virtual std::string self_close_tag(std::string_view text) const = 0;
  virtual std::string colon() const = 0;
  virtual std::string list_separator() const = 0;
  /// Encodes scalar text; throws when the text cannot be represented.
  virtual std::string scalar_text(std::string_view raw) const = 0;
  /// Encodes an instance reference inside an exec binding.
  virtual std::string reference_text(std::string_view ref) const = 0;
  /// Whether a bare string would be misread in the current context.
  virtual bool bare_string_breaks_list(std::string_view raw) const = 0;
  virtual bool bare_key_ok(std::string_view key) const = 0;
};

std::string print_document(const Document& doc, const Dialect& dialect, const PrintOptions& options);

}  // namespace llmon::detail
