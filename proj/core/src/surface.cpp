#include "llmon/surface.hpp"

#include "llmon/error.hpp"
#include "syntax_parser.hpp"

namespace llmon {

namespace {

class SurfaceLexer {
 public:
  explicit SurfaceLexer(std::string_view input) : in_(input) {}

  std::vector<SurfaceToken> run() {
    std::size_t i = 0;
    const std::size_t n = in_.size();
    while (i < n) {
      const char c = in_[i];
      if (c == '\\') {
        if (i + 1 < n && (in_[i + 1] == '\\' || in_[i + 1] == '/')) {
          append_scalar(in_[i + 1], i);
          i += 2;
          continue;
        }
        if (i + 1 < n && is_tag_start_char(in_[i + 1])) {
          const std::size_t end = scan_tag_text(i + 1);
          if (end < n && (in_[end] == '\\' || in_[end] == '/')) {
            const std::string text(in_.substr(i + 1, end - i - 1));
            if (in_[end] == '\\') {
              emit(detail::start_kind_for(text), text, i, end + 1);
              frames_.open(text);
            } else {
              emit(TokenKind::SelfCloseUserTag, text, i, end + 1);
            }
            i = end + 1;
            continue;
          }
          throw Error(ErrorCode::UnterminatedTag,
                      "tag '\\" + std::string(in_.substr(i + 1, end - i - 1)) + "' is never terminated", i);
        }
        throw Error(ErrorCode::BadEscape,
                    i + 1 < n ? "'\\' must be followed by '\\', '/' or a tag name"
                              : "'\\' at end of input",
                    i);
      }
      if (c == '/') {
        if (i + 1 < n && is_tag_start_char(in_[i + 1])) {
          const std::size_t end = scan_tag_text(i + 1);
          if (end < n && in_[end] == '/') {
            const std::string text(in_.substr(i + 1, end - i - 1));
            emit(detail::end_kind_for(text), text, i, end + 1);
            frames_.close();
            i = end + 1;
            continue;
          }
          throw Error(ErrorCode::UnterminatedTag,
                      "close tag '/" + std::string(in_.substr(i + 1, end - i - 1)) + "' is never terminated",
                      i);
        }
        throw Error(ErrorCode::BadEscape, "unescaped '/' in text (write '\\/')", i);
      }
      if (c == ':' && frames_.take_item_colon()) {
        emit(TokenKind::ColonSeparator, ":", i, i + 1);
        ++i;
        continue;
      }
      if (c == ',' && frames_.in_list()) {
        emit(TokenKind::ListSeparator, ",", i, i + 1);
        ++i;
        continue;
      }
      append_scalar(c, i);
      // Escapes are two bytes; plain characters are one.
      ++i;
      scalar_end_ = i;
    }
    flush();
    return std::move(out_);
  }

 private:
  std::size_t scan_tag_text(std::size_t from) const {
    std::size_t j = from;
    while (j < in_.size() && is_tag_char(in_[j])) ++j;
    return j;
  }

  void append_scalar(char decoded, std::size_t at) {
    if (!scalar_open_) {
      scalar_open_ = true;
      scalar_begin_ = at;
      scalar_.clear();
    }
    scalar_ += decoded;
    // Covers both the one-byte and the two-byte (escape) case.
    scalar_end_ = (in_[at] == '\\') ? at + 2 : at + 1;
  }

  void flush() {
    if (!scalar_open_) return;
    SurfaceToken tok;
    tok.kind = TokenKind::ScalarText;
    tok.text = std::move(scalar_);
    tok.bytes = ByteRange{scalar_begin_, scalar_end_};
    tok.tokens = TokenRange{out_.size(), out_.size()};
    out_.push_back(std::move(tok));
    scalar_open_ = false;
    scalar_.clear();
  }

  void emit(TokenKind kind, std::string text, std::size_t begin, std::size_t end) {
    flush();
    SurfaceToken tok;
    tok.kind = kind;
    tok.text = std::move(text);
    tok.bytes = ByteRange{begin, end};
    tok.tokens = TokenRange{out_.size(), out_.size()};
    out_.push_back(std::move(tok));
  }

  std::string_view in_;
  std::vector<SurfaceToken> out_;
  detail::FrameStack frames_;
  bool scalar_open_ = false;
  std::size_t scalar_begin_ = 0;
  std::size_t scalar_end_ = 0;
  std::string scalar_;
};

class SurfaceDialect final : public detail::Dialect {
 public:
  std::string open_tag(std::string_view text) const override {
    return "\\" + std::string(text) + "\\";
  }
  std::string end_tag(std::string_view text) const override { return "/" + std::string(text) + "/"; }
  std::string self_close_tag(std::string_view text) const override {
    return "\\" + std::string(text) + "/";
  }
  std::string colon() const override { return ":"; }
  std::string list_separator() const override { return ","; }
  std::string scalar_text(std::string_view raw) const override { return escape_surface_text(raw); }
  std::string reference_text(std::string_view ref) const override { return std::string(ref); }
  bool bare_string_breaks_list(std::string_view raw) const override {
    return raw.find(',') != std::string_view::npos;
  }
  bool bare_key_ok(std::string_view key) const override {
    return key.find(':') == std::string_view::npos;
  }
};

}  // namespace

std::vector<SurfaceToken> lex_surface(std::string_view input) { return SurfaceLexer(input).run(); }

Document parse_surface(std::string_view input, const ParseOptions& options,
                       std::vector<ParseWarning>* warnings) {
  const auto tokens = lex_surface(input);
  return detail::parse_terminals(tokens, input.size(), options, warnings, false).doc;
}

Document parse_surface_counted(std::string_view input, std::size_t& tokens_lexed,
                               std::size_t& tokens_consumed, const ParseOptions& options) {
  const auto tokens = lex_surface(input);
  auto tree = detail::parse_terminals(tokens, input.size(), options, nullptr, false);
  tokens_lexed = tokens.size();
  tokens_consumed = tree.tokens_consumed;
  return std::move(tree.doc);
}

std::string print_surface(const Document& doc, const PrintOptions& options) {
  return detail::print_document(doc, SurfaceDialect{}, options);
}

std::string escape_surface_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == '\\' || c == '/') out += '\\';
    out += c;
  }
  return out;
}

std::string encode_surface_token(const SurfaceToken& token) {
  switch (token.kind) {
    case TokenKind::StartUserTag:
    case TokenKind::StartObjectTag:
    case TokenKind::StartObjectItemTag:
    case TokenKind::StartListTag:
      return "\\" + token.text + "\\";
    case TokenKind::EndUserTag:
    case TokenKind::EndObjectTag:
    case TokenKind::EndObjectItemTag:
    case TokenKind::EndListTag:
      return "/" + token.text + "/";
    case TokenKind::SelfCloseUserTag:
      return "\\" + token.text + "/";
    case TokenKind::ColonSeparator:
      return ":";
    case TokenKind::ListSeparator:
      return ",";
    case TokenKind::ScalarText:
      return escape_surface_text(token.text);
  }
  return {};
}

}  // namespace llmon
