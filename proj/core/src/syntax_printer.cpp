#include <algorithm>
#include <optional>
#include <string>

#include "llmon/error.hpp"
#include "syntax_parser.hpp"

namespace llmon::detail {

namespace {

enum class Context { Sequence, ItemValue, ListElement };

class Printer {
 public:
  Printer(const Dialect& dialect, const PrintOptions& options)
      : d_(dialect),
        opts_(options),
        vocab_(options.vocabulary ? *options.vocabulary : default_vocabulary()),
        indented_(options.style == PrintStyle::Indented) {}

  std::string document(const Document& doc) {
    std::string out;
    bool prev_bare = false;
    for (std::size_t i = 0; i < doc.roots.size(); ++i) {
      if (i && indented_) out += '\n';
      out += node(doc.roots[i], 0, Context::Sequence, TagPath{}, prev_bare);
    }
    return out;
  }

 private:
  std::string pad(int level) const { return indented_ ? std::string(2 * level, ' ') : std::string(); }
  std::string newline() const { return indented_ ? "\n" : ""; }

  std::string item_tag() const {
    return std::string(opts_.flat_structural_names ? kFlatItemTag : kItemTag);
  }
  std::string list_tag(Context ctx) const {
    return std::string(opts_.flat_structural_names && ctx == Context::ItemValue ? kFlatListTag
                                                                                  : kListTag);
  }

  static bool looks_typed(std::string_view raw) {
    return is_bool_literal(raw) || is_null_literal(raw) || is_number_literal(raw);
  }

  // Whether a scalar must be written with its cast tag to survive re-parsing.
  bool needs_cast(const Scalar& s, Context ctx, bool prev_bare) const {
    switch (s.kind) {
      case ScalarKind::Integer:
      case ScalarKind::Float:
        return true;
      case ScalarKind::Boolean:
      case ScalarKind::Null:
        return s.cast_explicit || prev_bare;
      case ScalarKind::String:
        return s.cast_explicit || prev_bare || s.raw.empty() || trim(s.raw).size() != s.raw.size() ||
               looks_typed(s.raw) ||
               (ctx == Context::ListElement && d_.bare_string_breaks_list(s.raw));
    }
    return true;
  }

  std::string scalar(const Scalar& s, Context ctx, bool& prev_bare) {
    if (needs_cast(s, ctx, prev_bare)) {
      prev_bare = false;
      const std::string_view tag = cast_tag_for_kind(s.kind);
      if (s.kind == ScalarKind::Null) return d_.self_close_tag(tag);
      return d_.open_tag(tag) + d_.scalar_text(s.raw) + d_.end_tag(tag);
    }
    prev_bare = true;
    return d_.scalar_text(s.raw);
  }

  bool is_reference_slot(const TagPath& effective) const {
    if (effective.size() < 2) return false;
    const TagSegment& last = effective.back();
    if (last.instance) return false;
    if (last.name != vocab_.exec_instr_child && last.name != vocab_.exec_input_child) return false;
    return effective.segments()[effective.size() - 2].name == vocab_.exec_tag;
  }

  // Single-line rendering is used for leaves and scalar-only content.
  static bool is_simple(const Node& n) {
    if (n.is_scalar()) return true;
    if (n.is_tagged()) {
      const auto& t = n.tagged();
      return t.children.empty() || (t.children.size() == 1 && t.children.front().is_scalar());
    }
    if (n.is_object()) return n.object().items.empty();
    return n.list().elements.empty();
  }

  std::string node(const Node& n, int level, Context ctx, const TagPath& ancestor, bool& prev_bare) {
    if (n.is_scalar()) return scalar(n.scalar(), ctx, prev_bare);
    prev_bare = false;
    if (n.is_tagged()) return tagged(n.tagged(), level, ancestor);
    if (n.is_object()) return object(n.object(), level, ancestor);
    return list(n.list(), level, ctx, ancestor);
  }

  std::string tagged(const UserTagged& t, int level, const TagPath& ancestor) {
    const std::string text = t.tag.to_string();
    if (t.self_closed) return d_.self_close_tag(text);
    const TagPath effective = join_nested_path(ancestor, t.tag).value_or(t.tag);
    if (t.children.empty()) return d_.open_tag(text) + d_.end_tag(text);

    if (t.children.size() == 1 && t.children.front().is_scalar()) {
      const Scalar& s = t.children.front().scalar();
      if (s.kind == ScalarKind::String && !s.cast_explicit && is_reference_slot(effective) &&
          s.raw == trim(s.raw) && TagPath::try_parse(s.raw)) {
        return d_.open_tag(text) + d_.reference_text(s.raw) + d_.end_tag(text);
      }
      bool prev_bare = false;
      return d_.open_tag(text) + scalar(s, Context::Sequence, prev_bare) + d_.end_tag(text);
    }

    std::string out = d_.open_tag(text) + newline();
    bool prev_bare = false;
    for (const Node& child : t.children) {
      out += pad(level + 1) + node(child, level + 1, Context::Sequence, effective, prev_bare) + newline();
    }
    out += pad(level) + d_.end_tag(text);
    return out;
  }

  std::string key(const std::string& k) const {
    if (d_.bare_key_ok(k) && !k.empty() && trim(k).size() == k.size()) return d_.scalar_text(k);
    return d_.open_tag("string") + d_.scalar_text(k) + d_.end_tag("string");
  }

  std::string object(const Object& o, int level, const TagPath& ancestor) {
    const std::string open(kObjectTag);
    if (o.items.empty()) return d_.open_tag(open) + d_.end_tag(open);
    std::string out = d_.open_tag(open) + newline();
    const std::string itag = item_tag();
    for (const ObjectItem& item : o.items) {
      out += pad(level + 1) + d_.open_tag(itag) + key(item.key) + d_.colon();
      bool prev_bare = false;
      if (is_simple(item.value)) {
        if (indented_ && d_.colon() == ":") out += ' ';
        out += node(item.value, level + 1, Context::ItemValue, ancestor, prev_bare);
        out += d_.end_tag(itag) + newline();
      } else {
        out += newline() + pad(level + 2) +
               node(item.value, level + 2, Context::ItemValue, ancestor, prev_bare) + newline();
        out += pad(level + 1) + d_.end_tag(itag) + newline();
      }
    }
    out += pad(level) + d_.end_tag(open);
    return out;
  }

  std::string list(const List& l, int level, Context ctx, const TagPath& ancestor) {
    const std::string tag = list_tag(ctx);
    if (l.elements.empty()) return d_.open_tag(tag) + d_.end_tag(tag);
    const bool all_scalar = std::all_of(l.elements.begin(), l.elements.end(),
                                        [](const Node& n) { return n.is_scalar(); });
    std::string out = d_.open_tag(tag) + newline();
    if (all_scalar) {
      out += pad(level + 1);
      for (std::size_t i = 0; i < l.elements.size(); ++i) {
        if (i) out += d_.list_separator() + (indented_ && d_.list_separator() == "," ? " " : "");
        bool prev_bare = false;
        out += node(l.elements[i], level + 1, Context::ListElement, ancestor, prev_bare);
      }
      out += newline();
    } else {
      for (std::size_t i = 0; i < l.elements.size(); ++i) {
        bool prev_bare = false;
        out += pad(level + 1) + node(l.elements[i], level + 1, Context::ListElement, ancestor, prev_bare);
        if (i + 1 < l.elements.size()) out += d_.list_separator();
        out += newline();
      }
    }
    out += pad(level) + d_.end_tag(tag);
    return out;
  }

  const Dialect& d_;
  const PrintOptions& opts_;
  const Vocabulary& vocab_;
  bool indented_;
};

}  // namespace

std::string print_document(const Document& doc, const Dialect& dialect, const PrintOptions& options) {
  return Printer(dialect, options).document(doc);
}

}  // namespace llmon::detail
