#include "llmon/machine.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "llmon/error.hpp"
#include "syntax_parser.hpp"

namespace llmon {

namespace {

constexpr SpecialRole kRoles[kSpecialRoleCount] = {
    SpecialRole::Open, SpecialRole::OpenEnd, SpecialRole::Close,        SpecialRole::SelfClose,
    SpecialRole::Dot,  SpecialRole::Colon,   SpecialRole::ListSeparator};

std::optional<SpecialRole> role_for_text(std::string_view text) {
  for (SpecialRole r : kRoles) {
    if (default_special_text(r) == text) return r;
  }
  return std::nullopt;
}

}  // namespace

std::string_view default_special_text(SpecialRole role) noexcept {
  switch (role) {
    case SpecialRole::Open: return "<|open|>";
    case SpecialRole::OpenEnd: return "<|open_end|>";
    case SpecialRole::Close: return "<|close|>";
    case SpecialRole::SelfClose: return "<|self_close|>";
    case SpecialRole::Dot: return "<|.|>";
    case SpecialRole::Colon: return "<|:|>";
    case SpecialRole::ListSeparator: return "<|list-separator|>";
  }
  return "";
}

std::uint64_t ordinary_token_id(std::string_view text) noexcept {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : text) {
    h ^= c;
    h *= 16777619u;
  }
  return kOrdinaryIdBase + h;
}

// -- registry -----------------------------------------------------------------

SpecialTokenRegistry::SpecialTokenRegistry() {
  for (std::size_t i = 0; i < kSpecialRoleCount; ++i) {
    entries_.push_back(Entry{std::string(default_special_text(kRoles[i])), i, kRoles[i]});
  }
  finalize();
}

SpecialTokenRegistry SpecialTokenRegistry::from_json(std::string_view json) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRegistry, std::string("registry is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidRegistry, "registry must be a JSON object");

  SpecialTokenRegistry reg;
  reg.entries_.clear();
  bool seen[kSpecialRoleCount] = {};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& text = it.key();
    if (text.empty()) throw Error(ErrorCode::InvalidRegistry, "empty special string");
    if (!it.value().is_number_unsigned()) {
      throw Error(ErrorCode::InvalidRegistry, "id for '" + text + "' must be a non-negative integer");
    }
    const auto id = it.value().get<std::uint64_t>();
    if (id >= kOrdinaryIdBase) {
      throw Error(ErrorCode::InvalidRegistry, "id for '" + text + "' must be below 2^32");
    }
    for (const Entry& e : reg.entries_) {
      if (e.id == id) {
        throw Error(ErrorCode::InvalidRegistry, "'" + text + "' and '" + e.text + "' share id " + std::to_string(id));
      }
    }
    const auto role = role_for_text(text);
    if (role) seen[static_cast<std::size_t>(*role)] = true;
    reg.entries_.push_back(Entry{text, id, role});
  }
  for (SpecialRole r : kRoles) {
    if (!seen[static_cast<std::size_t>(r)]) {
      throw Error(ErrorCode::InvalidRegistry,
                  "registry is missing '" + std::string(default_special_text(r)) + "'");
    }
  }
  reg.finalize();
  return reg;
}

void SpecialTokenRegistry::finalize() {
  by_length_.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) by_length_[i] = i;
  std::stable_sort(by_length_.begin(), by_length_.end(), [&](std::size_t a, std::size_t b) {
    return entries_[a].text.size() > entries_[b].text.size();
  });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].role) role_index_[static_cast<std::size_t>(*entries_[i].role)] = i;
  }
  warnings_.clear();
  for (const Entry& a : entries_) {
    for (const Entry& b : entries_) {
      if (&a != &b && b.text.size() > a.text.size() && b.text.find(a.text) != std::string::npos) {
        warnings_.push_back("special '" + a.text + "' is a substring of '" + b.text +
                            "'; longest match wins");
      }
    }
  }
}

std::string SpecialTokenRegistry::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const Entry& e : entries_) doc[e.text] = e.id;
  return doc.dump();
}

const std::string& SpecialTokenRegistry::text(SpecialRole role) const {
  return entries_[role_index_[static_cast<std::size_t>(role)]].text;
}

std::uint64_t SpecialTokenRegistry::id(SpecialRole role) const {
  return entries_[role_index_[static_cast<std::size_t>(role)]].id;
}

const SpecialTokenRegistry::Entry* SpecialTokenRegistry::find(std::string_view text) const noexcept {
  for (const Entry& e : entries_) {
    if (e.text == text) return &e;
  }
  return nullptr;
}

const SpecialTokenRegistry::Entry* SpecialTokenRegistry::match_at(std::string_view input,
                                                                  std::size_t pos) const noexcept {
  if (pos >= input.size()) return nullptr;
  const std::string_view rest = input.substr(pos);
  for (std::size_t i : by_length_) {
    const std::string& t = entries_[i].text;
    if (rest.size() >= t.size() && rest.compare(0, t.size(), t) == 0) return &entries_[i];
  }
  return nullptr;
}

std::optional<SpecialRole> SpecialTokenRegistry::find_role_string(std::string_view text) const noexcept {
  for (SpecialRole r : kRoles) {
    if (text.find(this->text(r)) != std::string_view::npos) return r;
  }
  return std::nullopt;
}

const SpecialTokenRegistry& default_registry() {
  static const SpecialTokenRegistry reg;
  return reg;
}

// -- tokenizer ----------------------------------------------------------------

void DeskTokenizer::split(std::string_view text, std::size_t byte_base, std::vector<Token>& out) const {
  std::size_t i = 0;
  while (i < text.size()) {
    const bool ws = is_space(text[i]);
    std::size_t j = i + 1;
    while (j < text.size() && is_space(text[j]) == ws) ++j;
    const std::string_view piece = text.substr(i, j - i);
    out.push_back(Token{ordinary_token_id(piece), std::string(piece), false,
                        ByteRange{byte_base + i, byte_base + j}});
    i = j;
  }
}

std::vector<Token> tokenize(std::string_view input, const SpecialTokenRegistry& registry,
                            const OrdinaryTokenizer* ordinary) {
  static const DeskTokenizer desk;
  const OrdinaryTokenizer& plain = ordinary ? *ordinary : desk;
  std::vector<Token> out;
  std::size_t run_start = 0;
  std::size_t i = 0;
  while (i < input.size()) {
    const auto* m = registry.match_at(input, i);
    if (!m) {
      ++i;
      continue;
    }
    if (run_start < i) plain.split(input.substr(run_start, i - run_start), run_start, out);
    out.push_back(Token{m->id, m->text, true, ByteRange{i, i + m->text.size()}});
    i += m->text.size();
    run_start = i;
  }
  if (run_start < input.size()) plain.split(input.substr(run_start), run_start, out);
  return out;
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) out += t.text;
  return out;
}

std::optional<TokenRange> TokenSequence::span(NodeId id) const {
  if (id.value >= span_index.size()) return std::nullopt;
  return span_index[id.value];
}

// -- lexer --------------------------------------------------------------------

namespace {

class MachineLexer {
 public:
  MachineLexer(const std::vector<Token>& tokens, std::size_t input_size, const SpecialTokenRegistry& reg)
      : toks_(tokens), input_size_(input_size), reg_(reg) {}

  std::vector<SyntaxToken> run() {
    std::size_t i = 0;
    while (i < toks_.size()) {
      const Token& t = toks_[i];
      const auto role = role_of(t);
      if (!role) {
        append_scalar(t.text, i);
        ++i;
        continue;
      }
      switch (*role) {
        case SpecialRole::Open:
        case SpecialRole::OpenEnd:
          i = read_tag(i, *role == SpecialRole::OpenEnd);
          continue;
        case SpecialRole::Close:
        case SpecialRole::SelfClose:
          fail(ErrorCode::UnexpectedToken, "'" + t.text + "' without an opening tag token", i);
        case SpecialRole::Dot:
          append_scalar(".", i);
          break;
        case SpecialRole::Colon:
          if (frames_.take_item_colon()) {
            emit(TokenKind::ColonSeparator, ":", i, i);
          } else {
            append_scalar(":", i);
          }
          break;
        case SpecialRole::ListSeparator:
          emit(TokenKind::ListSeparator, ",", i, i);
          break;
      }
      ++i;
    }
    flush();
    return std::move(out_);
  }

 private:
  std::optional<SpecialRole> role_of(const Token& t) const {
    if (!t.is_special) return std::nullopt;
    const auto* e = reg_.find(t.text);
    return e ? e->role : std::nullopt;
  }

  [[noreturn]] void fail(ErrorCode code, std::string message, std::size_t at) const {
    const std::size_t offset = at < toks_.size() ? toks_[at].bytes.begin : input_size_;
    throw Error(code, std::move(message), offset, at);
  }

  // Reads tag text after an opening special up to `<|close|>` or
  // `<|self_close|>`; returns the index after the terminator.
  std::size_t read_tag(std::size_t start, bool is_end) {
    std::string text;
    bool pending_space = false;
    std::size_t j = start + 1;
    for (; j < toks_.size(); ++j) {
      const Token& t = toks_[j];
      const auto role = role_of(t);
      if (role == SpecialRole::Close || role == SpecialRole::SelfClose) break;
      if (role == SpecialRole::Dot || role == SpecialRole::Colon) {
        if (pending_space) fail(ErrorCode::InvalidTagText, "whitespace inside tag text", j);
        text += role == SpecialRole::Dot ? '.' : ':';
        continue;
      }
      if (role || t.is_special) {
        fail(ErrorCode::UnterminatedTag, "tag is never terminated before '" + t.text + "'", start);
      }
      if (trim(t.text).empty()) {
        if (!text.empty()) pending_space = true;
        continue;
      }
      if (pending_space) fail(ErrorCode::InvalidTagText, "whitespace inside tag text", j);
      text += t.text;
    }
    if (j >= toks_.size()) fail(ErrorCode::UnterminatedTag, "tag is never terminated", start);
    if (text.empty()) fail(ErrorCode::InvalidTagText, "empty tag text", start);
    const bool self_close = role_of(toks_[j]) == SpecialRole::SelfClose;
    if (is_end && self_close) {
      fail(ErrorCode::UnexpectedToken, "a closing tag cannot self-close", j);
    }
    if (is_end) {
      emit(detail::end_kind_for(text), text, start, j);
      frames_.close();
    } else if (self_close) {
      emit(TokenKind::SelfCloseUserTag, text, start, j);
    } else {
      emit(detail::start_kind_for(text), text, start, j);
      frames_.open(text);
    }
    return j + 1;
  }

  void append_scalar(std::string_view text, std::size_t at) {
    if (!scalar_open_) {
      scalar_open_ = true;
      scalar_first_ = at;
      scalar_.clear();
    }
    scalar_ += text;
    scalar_last_ = at;
  }

  void flush() {
    if (!scalar_open_) return;
    SyntaxToken tok;
    tok.kind = TokenKind::ScalarText;
    tok.text = std::move(scalar_);
    tok.bytes = ByteRange{toks_[scalar_first_].bytes.begin, toks_[scalar_last_].bytes.end};
    tok.tokens = TokenRange{scalar_first_, scalar_last_};
    out_.push_back(std::move(tok));
    scalar_open_ = false;
    scalar_.clear();
  }

  void emit(TokenKind kind, std::string text, std::size_t first, std::size_t last) {
    flush();
    SyntaxToken tok;
    tok.kind = kind;
    tok.text = std::move(text);
    tok.bytes = ByteRange{toks_[first].bytes.begin, toks_[last].bytes.end};
    tok.tokens = TokenRange{first, last};
    out_.push_back(std::move(tok));
  }

  const std::vector<Token>& toks_;
  std::size_t input_size_;
  const SpecialTokenRegistry& reg_;
  std::vector<SyntaxToken> out_;
  detail::FrameStack frames_;
  bool scalar_open_ = false;
  std::size_t scalar_first_ = 0;
  std::size_t scalar_last_ = 0;
  std::string scalar_;
};

class MachineDialect final : public detail::Dialect {
 public:
  explicit MachineDialect(const SpecialTokenRegistry& reg) : reg_(reg) {}

  std::string open_tag(std::string_view text) const override {
    return reg_.text(SpecialRole::Open) + tag_text(text) + reg_.text(SpecialRole::Close);
  }
  std::string end_tag(std::string_view text) const override {
    return reg_.text(SpecialRole::OpenEnd) + tag_text(text) + reg_.text(SpecialRole::Close);
  }
  std::string self_close_tag(std::string_view text) const override {
    return reg_.text(SpecialRole::Open) + tag_text(text) + reg_.text(SpecialRole::SelfClose);
  }
  std::string colon() const override { return reg_.text(SpecialRole::Colon); }
  std::string list_separator() const override { return reg_.text(SpecialRole::ListSeparator); }
  std::string scalar_text(std::string_view raw) const override {
    if (const auto role = reg_.find_role_string(raw)) {
      throw Error(ErrorCode::UnrepresentableScalar,
                  "text contains the special string '" + reg_.text(*role) + "' and has no machine form");
    }
    return std::string(raw);
  }
  std::string reference_text(std::string_view ref) const override { return tag_text(ref); }
  bool bare_string_breaks_list(std::string_view) const override { return false; }
  bool bare_key_ok(std::string_view) const override { return true; }

 private:
  std::string tag_text(std::string_view text) const {
    std::string out;
    for (char c : text) {
      if (c == '.') {
        out += reg_.text(SpecialRole::Dot);
      } else if (c == ':') {
        out += reg_.text(SpecialRole::Colon);
      } else {
        out += c;
      }
    }
    return out;
  }

  const SpecialTokenRegistry& reg_;
};

ParsedMachine parse_impl(std::string_view input, const SpecialTokenRegistry& registry,
                         const ParseOptions& options, std::vector<ParseWarning>* warnings,
                         std::size_t* lexed, std::size_t* consumed) {
  ParsedMachine out;
  out.tokens.tokens = tokenize(input, registry);
  const auto terminals = lex_machine(out.tokens.tokens, input.size(), registry);
  auto tree = detail::parse_terminals(terminals, input.size(), options, warnings, true);
  if (lexed) *lexed = terminals.size();
  if (consumed) *consumed = tree.tokens_consumed;
  out.document = std::move(tree.doc);
  out.tokens.span_index = std::move(tree.token_spans);
  return out;
}

}  // namespace

std::vector<SyntaxToken> lex_machine(const std::vector<Token>& tokens, std::size_t input_size,
                                     const SpecialTokenRegistry& registry) {
  return MachineLexer(tokens, input_size, registry).run();
}

ParsedMachine parse_machine(std::string_view input, const SpecialTokenRegistry& registry,
                            const ParseOptions& options, std::vector<ParseWarning>* warnings) {
  return parse_impl(input, registry, options, warnings, nullptr, nullptr);
}

ParsedMachine parse_machine_counted(std::string_view input, std::size_t& terminals_lexed,
                                    std::size_t& terminals_consumed, const SpecialTokenRegistry& registry,
                                    const ParseOptions& options) {
  return parse_impl(input, registry, options, nullptr, &terminals_lexed, &terminals_consumed);
}

std::string print_machine(const Document& doc, const SpecialTokenRegistry& registry,
                          const PrintOptions& options) {
  return detail::print_document(doc, MachineDialect(registry), options);
}

std::string normalize_machine_whitespace(std::string_view text, const SpecialTokenRegistry& registry) {
  const auto tokens = tokenize(text, registry);
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (!t.is_special && trim(t.text).empty()) {
      const bool before_special = i + 1 >= tokens.size() || tokens[i + 1].is_special;
      const bool after_special = i == 0 || tokens[i - 1].is_special;
      if (!before_special && !after_special) out += ' ';
      continue;
    }
    out += t.text;
  }
  return out;
}

}  // namespace llmon
