#include "syntax_parser.hpp"

#include "llmon/error.hpp"

namespace llmon {

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::StartUserTag: return "start_user_tag";
    case TokenKind::EndUserTag: return "end_user_tag";
    case TokenKind::SelfCloseUserTag: return "self_close_user_tag";
    case TokenKind::StartObjectTag: return "start_object_tag";
    case TokenKind::EndObjectTag: return "end_object_tag";
    case TokenKind::StartObjectItemTag: return "start_object_item_tag";
    case TokenKind::EndObjectItemTag: return "end_object_item_tag";
    case TokenKind::StartListTag: return "start_list_tag";
    case TokenKind::EndListTag: return "end_list_tag";
    case TokenKind::ColonSeparator: return "colon_separator";
    case TokenKind::ListSeparator: return "list_separator";
    case TokenKind::ScalarText: return "scalar_text";
  }
  return "scalar_text";
}

}  // namespace llmon

namespace llmon::detail {

TokenKind start_kind_for(std::string_view tag_text) noexcept {
  if (is_object_tag_text(tag_text)) return TokenKind::StartObjectTag;
  if (is_item_tag_text(tag_text)) return TokenKind::StartObjectItemTag;
  if (is_list_tag_text(tag_text)) return TokenKind::StartListTag;
  return TokenKind::StartUserTag;
}

TokenKind end_kind_for(std::string_view tag_text) noexcept {
  if (is_object_tag_text(tag_text)) return TokenKind::EndObjectTag;
  if (is_item_tag_text(tag_text)) return TokenKind::EndObjectItemTag;
  if (is_list_tag_text(tag_text)) return TokenKind::EndListTag;
  return TokenKind::EndUserTag;
}

namespace {

bool is_end_kind(TokenKind k) {
  return k == TokenKind::EndUserTag || k == TokenKind::EndObjectTag ||
         k == TokenKind::EndObjectItemTag || k == TokenKind::EndListTag;
}

bool is_blank(const SyntaxToken& tok) {
  return tok.kind == TokenKind::ScalarText && trim(tok.text).empty();
}

class Parser {
 public:
  Parser(const std::vector<SyntaxToken>& tokens, std::size_t input_size, const ParseOptions& options,
         std::vector<ParseWarning>* warnings, bool report_token_index)
      : toks_(tokens),
        input_size_(input_size),
        options_(options),
        warnings_(warnings),
        report_token_index_(report_token_index) {}

  ParsedTree run() {
    std::vector<Node> roots = parse_items(0);
    if (pos_ < toks_.size()) {
      const SyntaxToken& tok = toks_[pos_];
      if (is_end_kind(tok.kind)) {
        fail(ErrorCode::UnexpectedToken, "close tag '" + tok.text + "' has no matching open tag", pos_);
      }
      fail(ErrorCode::UnexpectedToken,
           "expected an item, found " + describe(tok), pos_);
    }
    if (roots.empty()) {
      fail(ErrorCode::UnexpectedToken, "expected at least one item, found end of input", pos_);
    }
    ParsedTree out;
    out.doc.roots = std::move(roots);
    out.doc.source_spans.reserve(byte_spans_.size());
    for (const auto& span : byte_spans_) out.doc.source_spans.emplace_back(span);
    out.token_spans = std::move(token_spans_);
    out.tokens_consumed = consumed_;
    return out;
  }

 private:
  // -- token access --------------------------------------------------------

  const SyntaxToken* peek() const { return pos_ < toks_.size() ? &toks_[pos_] : nullptr; }

  const SyntaxToken& take() {
    ++consumed_;
    return toks_[pos_++];
  }

  void skip_blanks() {
    while (pos_ < toks_.size() && is_blank(toks_[pos_])) take();
  }

  std::string describe(const SyntaxToken& tok) const {
    std::string out(to_string(tok.kind));
    if (tok.kind != TokenKind::ScalarText && tok.kind != TokenKind::ColonSeparator &&
        tok.kind != TokenKind::ListSeparator) {
      out += " '" + tok.text + "'";
    }
    return out;
  }

  [[noreturn]] void fail(ErrorCode code, std::string message, std::size_t token_pos) const {
    const std::size_t offset = token_pos < toks_.size() ? toks_[token_pos].bytes.begin : input_size_;
    std::optional<std::size_t> token_index;
    if (report_token_index_) {
      token_index = token_pos < toks_.size() ? toks_[token_pos].tokens.first
                                             : (toks_.empty() ? 0 : toks_.back().tokens.last + 1);
    }
    throw Error(code, std::move(message), offset, token_index);
  }

  // -- node bookkeeping ------------------------------------------------------

  std::size_t begin_node(std::size_t first_token) {
    byte_spans_.push_back(ByteRange{toks_[first_token].bytes.begin, toks_[first_token].bytes.end});
    token_spans_.push_back(toks_[first_token].tokens);
    return byte_spans_.size() - 1;
  }

  void end_node(std::size_t id, std::size_t last_token) {
    byte_spans_[id].end = toks_[last_token].bytes.end;
    token_spans_[id].last = toks_[last_token].tokens.last;
  }

  void enter(std::size_t depth, std::size_t at) const {
    if (depth >= options_.max_depth) {
      fail(ErrorCode::DepthExceeded,
           "nesting deeper than " + std::to_string(options_.max_depth) + " levels", at);
    }
  }

  void check_close(const SyntaxToken& open, std::size_t close_pos) {
    const SyntaxToken& close = toks_[close_pos];
    if (close.text == open.text) return;
    if (options_.lenient_close_tags) {
      if (warnings_) {
        warnings_->push_back(ParseWarning{"close tag '" + close.text + "' does not match open tag '" +
                                              open.text + "'",
                                          close.bytes.begin});
      }
      return;
    }
    fail(ErrorCode::MismatchedCloseTag,
         "close tag '" + close.text + "' does not match open tag '" + open.text + "'", close_pos);
  }

  TagPath parse_tag(const SyntaxToken& tok, std::size_t at) const {
    try {
      return TagPath::parse(tok.text);
    } catch (const Error& e) {
      fail(e.code(), e.message(), at);
    }
  }

  // -- grammar ---------------------------------------------------------------

  // LLMON_LIST: zero or more LLMON_ITEMs. Stops at the first token that cannot
  // begin an item; the caller decides whether that token is acceptable.
  std::vector<Node> parse_items(std::size_t depth) {
    std::vector<Node> items;
    while (const SyntaxToken* tok = peek()) {
      switch (tok->kind) {
        case TokenKind::ScalarText: {
          if (is_blank(*tok)) {
            take();
            continue;
          }
          items.push_back(parse_bare_scalar());
          continue;
        }
        case TokenKind::StartUserTag:
          if (cast_kind_for_tag(tok->text)) {
            items.push_back(parse_cast(depth));
          } else {
            items.push_back(parse_user(depth));
          }
          continue;
        case TokenKind::SelfCloseUserTag:
          items.push_back(parse_self_closed());
          continue;
        case TokenKind::StartObjectTag:
          items.push_back(parse_object(depth));
          continue;
        case TokenKind::StartListTag:
          items.push_back(parse_list(depth));
          continue;
        default:
          return items;
      }
    }
    return items;
  }

  Node parse_bare_scalar() {
    const std::size_t at = pos_;
    const SyntaxToken& tok = take();
    const std::size_t id = begin_node(at);
    const std::string_view full = tok.text;
    const std::string_view text = trim(full);
    // Escapes never produce whitespace, so leading/trailing blanks map 1:1 to bytes.
    const std::size_t lead = static_cast<std::size_t>(text.data() - full.data());
    const std::size_t tail = full.size() - lead - text.size();
    byte_spans_[id] = ByteRange{tok.bytes.begin + lead, tok.bytes.end - tail};

    ScalarKind kind = ScalarKind::String;
    if (is_bool_literal(text)) {
      kind = ScalarKind::Boolean;
    } else if (is_null_literal(text)) {
      kind = ScalarKind::Null;
    } else if (options_.strict_grammar && is_integer_literal(text)) {
      kind = ScalarKind::Integer;
    } else if (options_.strict_grammar && is_number_literal(text)) {
      kind = ScalarKind::Float;
    }
    return make_scalar(std::string(text), kind, false);
  }

  Node parse_cast(std::size_t depth) {
    const std::size_t open_pos = pos_;
    enter(depth, open_pos);
    const SyntaxToken& open = take();
    const ScalarKind kind = *cast_kind_for_tag(open.text);
    const std::size_t id = begin_node(open_pos);
    std::string raw;
    while (true) {
      const SyntaxToken* tok = peek();
      if (!tok) {
        fail(ErrorCode::UnclosedTag, "cast tag '" + open.text + "' is never closed", open_pos);
      }
      if (tok->kind == TokenKind::ScalarText) {
        raw += take().text;
        continue;
      }
      if (tok->kind == TokenKind::EndUserTag) break;
      fail(ErrorCode::UnexpectedToken,
           "cast tag '" + open.text + "' may only contain scalar text, found " + describe(*tok), pos_);
    }
    const std::size_t close_pos = pos_;
    take();
    check_close(open, close_pos);
    end_node(id, close_pos);
    if (kind != ScalarKind::String) raw = std::string(trim(raw));
    if (!literal_matches_kind(raw, kind)) {
      fail(ErrorCode::BadCastValue,
           "'" + raw + "' is not a valid " + std::string(to_string(kind)) + " literal", open_pos);
    }
    return make_scalar(std::move(raw), kind, true);
  }

  Node parse_self_closed() {
    const std::size_t at = pos_;
    const SyntaxToken& tok = take();
    const std::size_t id = begin_node(at);
    end_node(id, at);
    if (is_structural_tag_text(tok.text)) {
      fail(ErrorCode::UnexpectedToken, "structural tag '" + tok.text + "' cannot self-close", at);
    }
    if (auto kind = cast_kind_for_tag(tok.text)) {
      if (*kind == ScalarKind::Null) return make_scalar("null", ScalarKind::Null, true);
      if (*kind == ScalarKind::String) return make_scalar("", ScalarKind::String, true);
      fail(ErrorCode::BadCastValue, "cast tag '" + tok.text + "' requires a value", at);
    }
    return make_tagged(parse_tag(tok, at), {}, true);
  }

  Node parse_user(std::size_t depth) {
    const std::size_t open_pos = pos_;
    enter(depth, open_pos);
    const SyntaxToken& open = take();
    TagPath tag = parse_tag(open, open_pos);
    const std::size_t id = begin_node(open_pos);
    std::vector<Node> children = parse_items(depth + 1);
    const SyntaxToken* tok = peek();
    if (!tok) fail(ErrorCode::UnclosedTag, "tag '" + open.text + "' is never closed", open_pos);
    if (tok->kind != TokenKind::EndUserTag) {
      if (is_end_kind(tok->kind)) {
        fail(ErrorCode::MismatchedCloseTag,
             "close tag '" + tok->text + "' does not match open tag '" + open.text + "'", pos_);
      }
      fail(ErrorCode::UnexpectedToken,
           "expected an item or '/" + open.text + "/', found " + describe(*tok), pos_);
    }
    const std::size_t close_pos = pos_;
    take();
    check_close(open, close_pos);
    end_node(id, close_pos);
    return make_tagged(std::move(tag), std::move(children), false);
  }

  Node parse_object(std::size_t depth) {
    const std::size_t open_pos = pos_;
    enter(depth, open_pos);
    const SyntaxToken& open = take();
    const std::size_t id = begin_node(open_pos);
    std::vector<ObjectItem> items;
    while (true) {
      skip_blanks();
      const SyntaxToken* tok = peek();
      if (!tok) fail(ErrorCode::UnclosedTag, "object is never closed", open_pos);
      if (tok->kind == TokenKind::EndObjectTag) break;
      if (tok->kind != TokenKind::StartObjectItemTag) {
        if (is_end_kind(tok->kind)) {
          fail(ErrorCode::MismatchedCloseTag,
               "close tag '" + tok->text + "' does not match open tag '" + open.text + "'", pos_);
        }
        fail(ErrorCode::UnexpectedToken, "expected an object item or '/object/', found " + describe(*tok),
             pos_);
      }
      items.push_back(parse_item(depth + 1));
    }
    const std::size_t close_pos = pos_;
    take();
    check_close(open, close_pos);
    end_node(id, close_pos);
    return make_object(std::move(items));
  }

  ObjectItem parse_item(std::size_t depth) {
    const std::size_t open_pos = pos_;
    enter(depth, open_pos);
    const SyntaxToken& open = take();

    // Key: bare text or a `string` cast, terminated by the colon separator.
    std::string bare_key;
    std::optional<std::string> cast_key;
    while (true) {
      const SyntaxToken* tok = peek();
      if (!tok) fail(ErrorCode::UnclosedTag, "object item is never closed", open_pos);
      if (tok->kind == TokenKind::ColonSeparator) {
        take();
        break;
      }
      if (tok->kind == TokenKind::ScalarText) {
        bare_key += take().text;
        continue;
      }
      if (tok->kind == TokenKind::StartUserTag && tok->text == "string" && !cast_key) {
        const std::size_t cast_pos = pos_;
        const SyntaxToken& cast_open = take();
        std::string text;
        while (peek() && peek()->kind == TokenKind::ScalarText) text += take().text;
        if (!peek()) fail(ErrorCode::UnclosedTag, "cast tag 'string' is never closed", cast_pos);
        if (peek()->kind != TokenKind::EndUserTag) {
          fail(ErrorCode::UnexpectedToken, "expected '/string/', found " + describe(*peek()), pos_);
        }
        const std::size_t close_pos = pos_;
        take();
        check_close(cast_open, close_pos);
        cast_key = std::move(text);
        continue;
      }
      fail(ErrorCode::UnexpectedToken, "expected an item key followed by ':', found " + describe(*tok),
           pos_);
    }
    std::string key;
    if (cast_key) {
      if (!trim(bare_key).empty()) {
        fail(ErrorCode::UnexpectedToken, "text around a cast item key", open_pos);
      }
      key = std::move(*cast_key);
    } else {
      key = std::string(trim(bare_key));
    }

    std::vector<Node> values = parse_items(depth + 1);
    const SyntaxToken* tok = peek();
    if (!tok) fail(ErrorCode::UnclosedTag, "object item is never closed", open_pos);
    if (values.size() != 1) {
      fail(ErrorCode::UnexpectedToken,
           values.empty() ? "object item '" + key + "' has no value"
                          : "object item '" + key + "' must hold exactly one value",
           pos_);
    }
    if (tok->kind != TokenKind::EndObjectItemTag) {
      if (is_end_kind(tok->kind)) {
        fail(ErrorCode::MismatchedCloseTag,
             "close tag '" + tok->text + "' does not match open tag '" + open.text + "'", pos_);
      }
      fail(ErrorCode::UnexpectedToken, "expected '/" + open.text + "/', found " + describe(*tok), pos_);
    }
    const std::size_t close_pos = pos_;
    take();
    check_close(open, close_pos);
    return ObjectItem{std::move(key), std::move(values.front())};
  }

  Node parse_list(std::size_t depth) {
    const std::size_t open_pos = pos_;
    enter(depth, open_pos);
    const SyntaxToken& open = take();
    const std::size_t id = begin_node(open_pos);
    std::vector<Node> elements;
    skip_blanks();
    const SyntaxToken* tok = peek();
    if (!tok) fail(ErrorCode::UnclosedTag, "list is never closed", open_pos);
    if (tok->kind != TokenKind::EndListTag) {
      while (true) {
        const std::size_t element_pos = pos_;
        std::vector<Node> values = parse_items(depth + 1);
        if (values.size() != 1) {
          fail(ErrorCode::UnexpectedToken,
               values.empty() ? "empty list element" : "list element must be a single value",
               values.empty() ? pos_ : element_pos);
        }
        elements.push_back(std::move(values.front()));
        tok = peek();
        if (!tok) fail(ErrorCode::UnclosedTag, "list is never closed", open_pos);
        if (tok->kind == TokenKind::ListSeparator) {
          take();
          continue;
        }
        if (tok->kind == TokenKind::EndListTag) break;
        if (is_end_kind(tok->kind)) {
          fail(ErrorCode::MismatchedCloseTag,
               "close tag '" + tok->text + "' does not match open tag '" + open.text + "'", pos_);
        }
        fail(ErrorCode::UnexpectedToken, "expected a list separator or '/" + open.text + "/', found " +
                                             describe(*tok),
             pos_);
      }
    }
    const std::size_t close_pos = pos_;
    take();
    check_close(open, close_pos);
    end_node(id, close_pos);
    return make_list(std::move(elements));
  }

  const std::vector<SyntaxToken>& toks_;
  std::size_t input_size_;
  const ParseOptions& options_;
  std::vector<ParseWarning>* warnings_;
  bool report_token_index_;
  std::size_t pos_ = 0;
  std::size_t consumed_ = 0;
  std::vector<ByteRange> byte_spans_;
  std::vector<TokenRange> token_spans_;
};

}  // namespace

ParsedTree parse_terminals(const std::vector<SyntaxToken>& tokens, std::size_t input_size,
                           const ParseOptions& options, std::vector<ParseWarning>* warnings,
                           bool report_token_index) {
  return Parser(tokens, input_size, options, warnings, report_token_index).run();
}

}  // namespace llmon::detail
