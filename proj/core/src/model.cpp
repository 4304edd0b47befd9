#include "llmon/model.hpp"

#include <algorithm>
#include <functional>

#include "llmon/error.hpp"

namespace llmon {

namespace {

bool is_alpha(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

bool is_instance_text(std::string_view text) noexcept {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return is_alpha(c) || is_digit(c) || c == '_'; });
}

struct ParseFailure {
  ErrorCode code;
  std::string message;
};

std::variant<TagPath, ParseFailure> parse_path(std::string_view text) {
  if (text.empty()) return ParseFailure{ErrorCode::InvalidTagText, "empty tag text"};
  for (char c : text) {
    if (!is_tag_char(c)) {
      return ParseFailure{ErrorCode::InvalidTagText,
                          "invalid character in tag text '" + std::string(text) + "'"};
    }
  }
  std::vector<TagSegment> segments;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = text.find('.', start);
    const std::string_view piece =
        text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (piece.empty()) {
      return ParseFailure{ErrorCode::EmptySegment,
                          "empty segment in tag text '" + std::string(text) + "'"};
    }
    TagSegment seg;
    const std::size_t colon = piece.find(':');
    const std::string_view name = piece.substr(0, colon);
    if (name.empty()) {
      return ParseFailure{ErrorCode::EmptySegment,
                          "empty segment name in tag text '" + std::string(text) + "'"};
    }
    if (!is_identifier(name)) {
      return ParseFailure{ErrorCode::InvalidTagText,
                          "segment '" + std::string(name) + "' is not an identifier"};
    }
    seg.name = std::string(name);
    if (colon != std::string_view::npos) {
      const std::string_view inst = piece.substr(colon + 1);
      if (inst.empty()) {
        return ParseFailure{ErrorCode::EmptySegment,
                            "empty instance in tag text '" + std::string(text) + "'"};
      }
      if (std::find(inst.begin(), inst.end(), ':') != inst.end()) {
        return ParseFailure{ErrorCode::InvalidTagText,
                            "more than one instance in segment '" + std::string(piece) + "'"};
      }
      if (!is_instance_text(inst)) {
        return ParseFailure{ErrorCode::InvalidTagText,
                            "invalid instance '" + std::string(inst) + "'"};
      }
      seg.instance = std::string(inst);
    }
    segments.push_back(std::move(seg));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return TagPath(std::move(segments));
}

}  // namespace

bool is_identifier(std::string_view text) noexcept {
  if (text.empty() || !is_tag_start_char(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(),
                     [](char c) { return is_alpha(c) || is_digit(c) || c == '_'; });
}

bool is_tag_start_char(char c) noexcept { return is_alpha(c) || c == '_'; }

bool is_tag_char(char c) noexcept {
  return is_alpha(c) || is_digit(c) || c == '_' || c == '.' || c == ':';
}

TagPath::TagPath(std::vector<TagSegment> segments) : segments_(std::move(segments)) {
  for (const auto& seg : segments_) {
    if (!is_identifier(seg.name)) {
      throw Error(ErrorCode::InvalidTagText, "segment '" + seg.name + "' is not an identifier");
    }
    if (seg.instance && !is_instance_text(*seg.instance)) {
      throw Error(ErrorCode::InvalidTagText, "invalid instance '" + *seg.instance + "'");
    }
  }
}

TagPath TagPath::parse(std::string_view text) {
  auto result = parse_path(text);
  if (auto* failure = std::get_if<ParseFailure>(&result)) {
    throw Error(failure->code, std::move(failure->message));
  }
  return std::get<TagPath>(std::move(result));
}

std::optional<TagPath> TagPath::try_parse(std::string_view text) {
  auto result = parse_path(text);
  if (auto* path = std::get_if<TagPath>(&result)) return std::move(*path);
  return std::nullopt;
}

std::string TagPath::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += '.';
    out += segments_[i].name;
    if (segments_[i].instance) {
      out += ':';
      out += *segments_[i].instance;
    }
  }
  return out;
}

bool TagPath::starts_with(const TagPath& prefix) const noexcept {
  if (prefix.size() > size()) return false;
  return std::equal(prefix.segments_.begin(), prefix.segments_.end(), segments_.begin());
}

TagPath TagPath::concat(const TagPath& suffix) const {
  TagPath out = *this;
  out.segments_.insert(out.segments_.end(), suffix.segments_.begin(), suffix.segments_.end());
  return out;
}

TagPath TagPath::parent() const {
  TagPath out;
  if (segments_.size() > 1) {
    out.segments_.assign(segments_.begin(), segments_.end() - 1);
  }
  return out;
}

std::string_view to_string(ScalarKind kind) noexcept {
  switch (kind) {
    case ScalarKind::String: return "string";
    case ScalarKind::Integer: return "integer";
    case ScalarKind::Float: return "float";
    case ScalarKind::Boolean: return "boolean";
    case ScalarKind::Null: return "null";
  }
  return "string";
}

Node make_tagged(TagPath tag, std::vector<Node> children, bool self_closed) {
  return Node{UserTagged{std::move(tag), std::move(children), self_closed}};
}

Node make_scalar(std::string raw, ScalarKind kind, bool cast_explicit) {
  return Node{Scalar{std::move(raw), kind, cast_explicit}};
}

Node make_object(std::vector<ObjectItem> items) { return Node{Object{std::move(items)}}; }

Node make_list(std::vector<Node> elements) { return Node{List{std::move(elements)}}; }

bool structurally_equal(const Node& a, const Node& b) {
  if (a.value.index() != b.value.index()) return false;
  if (a.is_tagged()) {
    const auto& x = a.tagged();
    const auto& y = b.tagged();
    if (x.tag != y.tag || x.self_closed != y.self_closed) return false;
    if (x.children.size() != y.children.size()) return false;
    for (std::size_t i = 0; i < x.children.size(); ++i) {
      if (!structurally_equal(x.children[i], y.children[i])) return false;
    }
    return true;
  }
  if (a.is_object()) {
    const auto& x = a.object().items;
    const auto& y = b.object().items;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].key != y[i].key || !structurally_equal(x[i].value, y[i].value)) return false;
    }
    return true;
  }
  if (a.is_list()) {
    const auto& x = a.list().elements;
    const auto& y = b.list().elements;
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!structurally_equal(x[i], y[i])) return false;
    }
    return true;
  }
  const auto& x = a.scalar();
  const auto& y = b.scalar();
  return x.kind == y.kind && x.raw == y.raw;
}

bool structurally_equal(const Document& a, const Document& b) {
  if (a.roots.size() != b.roots.size()) return false;
  for (std::size_t i = 0; i < a.roots.size(); ++i) {
    if (!structurally_equal(a.roots[i], b.roots[i])) return false;
  }
  return true;
}

bool Vocabulary::is_instruction(std::string_view name) const {
  return std::find(instruction_tags.begin(), instruction_tags.end(), name) !=
         instruction_tags.end();
}

bool Vocabulary::is_data(std::string_view name) const {
  return std::find(data_tags.begin(), data_tags.end(), name) != data_tags.end();
}

const Vocabulary& default_vocabulary() {
  static const Vocabulary vocab;
  return vocab;
}

bool is_object_tag_text(std::string_view text) noexcept { return text == kObjectTag; }
bool is_item_tag_text(std::string_view text) noexcept {
  return text == kItemTag || text == kFlatItemTag;
}
bool is_list_tag_text(std::string_view text) noexcept {
  return text == kListTag || text == kFlatListTag;
}
bool is_structural_tag_text(std::string_view text) noexcept {
  return is_object_tag_text(text) || is_item_tag_text(text) || is_list_tag_text(text);
}

std::optional<ScalarKind> cast_kind_for_tag(std::string_view text) noexcept {
  if (text == "int") return ScalarKind::Integer;
  if (text == "float") return ScalarKind::Float;
  if (text == "bool") return ScalarKind::Boolean;
  if (text == "string") return ScalarKind::String;
  if (text == "null") return ScalarKind::Null;
  return std::nullopt;
}

std::string_view cast_tag_for_kind(ScalarKind kind) noexcept {
  switch (kind) {
    case ScalarKind::String: return "string";
    case ScalarKind::Integer: return "int";
    case ScalarKind::Float: return "float";
    case ScalarKind::Boolean: return "bool";
    case ScalarKind::Null: return "null";
  }
  return "string";
}

bool is_reserved_tag_text(std::string_view text) noexcept {
  return is_structural_tag_text(text) || cast_kind_for_tag(text).has_value();
}

namespace {

// Consumes `-?(0|[1-9][0-9]*)` starting at `pos`; returns false on mismatch.
bool scan_int_part(std::string_view text, std::size_t& pos) noexcept {
  if (pos < text.size() && text[pos] == '-') ++pos;
  if (pos >= text.size() || !is_digit(text[pos])) return false;
  if (text[pos] == '0') {
    ++pos;
    return true;
  }
  while (pos < text.size() && is_digit(text[pos])) ++pos;
  return true;
}

}  // namespace

bool is_integer_literal(std::string_view text) noexcept {
  std::size_t pos = 0;
  return scan_int_part(text, pos) && pos == text.size();
}

bool is_number_literal(std::string_view text) noexcept {
  std::size_t pos = 0;
  if (!scan_int_part(text, pos)) return false;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && is_digit(text[pos])) ++pos;
    if (pos == digits) return false;
  }
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && is_digit(text[pos])) ++pos;
    if (pos == digits) return false;
  }
  return pos == text.size();
}

bool is_bool_literal(std::string_view text) noexcept { return text == "true" || text == "false"; }
bool is_null_literal(std::string_view text) noexcept { return text == "null"; }

bool literal_matches_kind(std::string_view raw, ScalarKind kind) noexcept {
  switch (kind) {
    case ScalarKind::String: return true;
    case ScalarKind::Integer: return is_integer_literal(raw);
    case ScalarKind::Float: return is_number_literal(raw);
    case ScalarKind::Boolean: return is_bool_literal(raw);
    case ScalarKind::Null: return is_null_literal(raw);
  }
  return false;
}

bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view text) noexcept {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::optional<TagPath> join_nested_path(const TagPath& ancestor, const TagPath& own) {
  if (ancestor.empty()) return own;
  if (own.size() > ancestor.size() && own.starts_with(ancestor)) return own;
  if (own.size() > 1 && own.front().name == ancestor.front().name) return std::nullopt;
  return ancestor.concat(own);
}

std::vector<SpanEntry> iter_spans(const Document& doc) {
  std::vector<SpanEntry> out;
  std::uint32_t next = 0;
  std::function<void(const Node&, int)> visit = [&](const Node& node, int depth) {
    SpanEntry entry;
    entry.id = NodeId{next++};
    entry.depth = depth;
    if (node.is_tagged()) {
      entry.label = node.tagged().tag;
    } else if (node.is_object()) {
      entry.label = StructuralKind::Object;
    } else if (node.is_list()) {
      entry.label = StructuralKind::List;
    } else {
      entry.label = StructuralKind::Scalar;
    }
    out.push_back(std::move(entry));
    if (node.is_tagged()) {
      for (const auto& child : node.tagged().children) visit(child, depth + 1);
    } else if (node.is_object()) {
      for (const auto& item : node.object().items) visit(item.value, depth + 1);
    } else if (node.is_list()) {
      for (const auto& element : node.list().elements) visit(element, depth + 1);
    }
  };
  for (const auto& root : doc.roots) visit(root, 0);
  return out;
}

DocumentIndex::DocumentIndex(const Document& doc) {
  std::function<void(const Node&, std::optional<NodeId>, std::optional<NodeId>, int)> visit =
      [&](const Node& node, std::optional<NodeId> parent, std::optional<NodeId> tagged_parent,
          int depth) {
        const NodeId id{static_cast<std::uint32_t>(entries_.size())};
        Entry entry;
        entry.node = &node;
        entry.parent = parent;
        entry.tagged_parent = tagged_parent;
        entry.depth = depth;
        if (node.is_tagged()) {
          const TagPath& own = node.tagged().tag;
          if (!tagged_parent) {
            entry.effective_path = own;
          } else {
            const Entry& anc = entries_[tagged_parent->value];
            if (anc.effective_path) {
              entry.effective_path = join_nested_path(*anc.effective_path, own);
              entry.flatten_conflict = !entry.effective_path.has_value();
            }
          }
        }
        entries_.push_back(std::move(entry));
        children_.emplace_back();
        if (parent) children_[parent->value].push_back(id);
        const std::optional<NodeId> next_tagged = node.is_tagged() ? std::optional(id) : tagged_parent;
        if (node.is_tagged()) {
          for (const auto& child : node.tagged().children) visit(child, id, next_tagged, depth + 1);
        } else if (node.is_object()) {
          for (const auto& item : node.object().items) visit(item.value, id, next_tagged, depth + 1);
        } else if (node.is_list()) {
          for (const auto& element : node.list().elements) visit(element, id, next_tagged, depth + 1);
        }
      };
  for (const auto& root : doc.roots) visit(root, std::nullopt, std::nullopt, 0);
}

}  // namespace llmon
