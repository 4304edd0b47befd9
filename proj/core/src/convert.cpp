#include "llmon/convert.hpp"

#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "llmon/error.hpp"
#include "llmon/surface.hpp"

namespace llmon {

std::string_view to_string(Format f) noexcept {
  switch (f) {
    case Format::Llmon: return "llmon";
    case Format::Mrllmon: return "mrllmon";
    case Format::Json: return "json";
  }
  return "llmon";
}

std::optional<Format> parse_format(std::string_view name) noexcept {
  if (name == "llmon") return Format::Llmon;
  if (name == "mrllmon") return Format::Mrllmon;
  if (name == "json") return Format::Json;
  return std::nullopt;
}

// -- flatten ------------------------------------------------------------------

namespace {

Node flatten_node(const Node& n, const TagPath& ancestor) {
  if (n.is_scalar()) return n;
  if (n.is_tagged()) {
    const UserTagged& t = n.tagged();
    auto effective = join_nested_path(ancestor, t.tag);
    if (!effective) {
      throw Error(ErrorCode::FlattenConflict,
                  "tag '" + t.tag.to_string() + "' disagrees with enclosing '" + ancestor.to_string() + "'");
    }
    UserTagged out;
    out.tag = *effective;
    out.self_closed = t.self_closed;
    out.children.reserve(t.children.size());
    for (const Node& c : t.children) out.children.push_back(flatten_node(c, out.tag));
    return Node{std::move(out)};
  }
  if (n.is_object()) {
    Object out;
    out.items.reserve(n.object().items.size());
    for (const ObjectItem& item : n.object().items) {
      out.items.push_back(ObjectItem{item.key, flatten_node(item.value, ancestor)});
    }
    return Node{std::move(out)};
  }
  List out;
  out.elements.reserve(n.list().elements.size());
  for (const Node& e : n.list().elements) out.elements.push_back(flatten_node(e, ancestor));
  return Node{std::move(out)};
}

}  // namespace

Document flatten(const Document& doc) {
  Document out;
  out.roots.reserve(doc.roots.size());
  for (const Node& r : doc.roots) out.roots.push_back(flatten_node(r, TagPath{}));
  // Node identities are unchanged by renaming, so spans carry over.
  out.source_spans = doc.source_spans;
  return out;
}

std::string surface_to_machine(std::string_view input, const SpecialTokenRegistry& registry,
                               const PrintOptions& options) {
  return print_machine(flatten(parse_surface(input)), registry, options);
}

std::string machine_to_surface(std::string_view input, const SpecialTokenRegistry& registry,
                               const PrintOptions& options) {
  return print_surface(parse_machine(input, registry).document, options);
}

// -- JSON -> Document ---------------------------------------------------------

namespace {

std::string format_double(double d) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

bool string_needs_cast(std::string_view s) {
  return is_bool_literal(s) || is_null_literal(s) || is_number_literal(s);
}

class JsonBuilder {
 public:
  using json = nlohmann::json;

  bool null() { return put(make_scalar("null", ScalarKind::Null, true)); }
  bool boolean(bool v) { return put(make_scalar(v ? "true" : "false", ScalarKind::Boolean, true)); }
  bool number_integer(json::number_integer_t v) {
    return put(make_scalar(std::to_string(v), ScalarKind::Integer, true));
  }
  bool number_unsigned(json::number_unsigned_t v) {
    return put(make_scalar(std::to_string(v), ScalarKind::Integer, true));
  }
  bool number_float(json::number_float_t v, const json::string_t&) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidJson, "number out of range");
    return put(make_scalar(format_double(v), ScalarKind::Float, true));
  }
  bool string(json::string_t& v) {
    const bool cast = string_needs_cast(v);
    return put(make_scalar(std::move(v), ScalarKind::String, cast));
  }
  bool binary(json::binary_t&) { throw Error(ErrorCode::InvalidJson, "binary values are not JSON text"); }
  bool start_object(std::size_t) {
    stack_.push_back(Frame{make_object({}), {}});
    return true;
  }
  bool key(json::string_t& k) {
    stack_.back().pending_key = std::move(k);
    return true;
  }
  bool end_object() { return pop(); }
  bool start_array(std::size_t) {
    stack_.push_back(Frame{make_list({}), {}});
    return true;
  }
  bool end_array() { return pop(); }
  bool parse_error(std::size_t position, const std::string&, const nlohmann::detail::exception& ex) {
    // nlohmann reports the 1-based position of the offending character.
    throw Error(ErrorCode::InvalidJson, ex.what(), position > 0 ? position - 1 : 0);
  }

  Node take_result() { return std::move(*result_); }

 private:
  struct Frame {
    Node node;
    std::string pending_key;
  };

  bool put(Node n) {
    if (stack_.empty()) {
      result_ = std::move(n);
      return true;
    }
    Frame& top = stack_.back();
    if (top.node.is_object()) {
      top.node.object().items.push_back(ObjectItem{std::move(top.pending_key), std::move(n)});
    } else {
      top.node.list().elements.push_back(std::move(n));
    }
    return true;
  }

  bool pop() {
    Node n = std::move(stack_.back().node);
    stack_.pop_back();
    return put(std::move(n));
  }

  std::vector<Frame> stack_;
  std::optional<Node> result_;
};

}  // namespace

Document json_to_llmon(std::string_view json_text) {
  JsonBuilder builder;
  try {
    nlohmann::json::sax_parse(json_text.begin(), json_text.end(), &builder);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidJson, e.what());
  }
  Document doc;
  doc.roots.push_back(builder.take_result());
  return doc;
}

// -- Document -> JSON ---------------------------------------------------------

namespace {

std::string json_string(const std::string& s) {
  try {
    return nlohmann::json(s).dump();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::UntranslatableNode, "string is not valid UTF-8");
  }
}

class JsonWriter {
 public:
  explicit JsonWriter(int indent) : indent_(indent) {}

  void value(const Node& n, int level) {
    if (n.is_tagged()) {
      throw Error(ErrorCode::UntranslatableNode,
                  "user tag '" + n.tagged().tag.to_string() + "' has no JSON counterpart");
    }
    if (n.is_scalar()) {
      const Scalar& s = n.scalar();
      switch (s.kind) {
        case ScalarKind::String: out_ += json_string(s.raw); return;
        case ScalarKind::Null: out_ += "null"; return;
        default: out_ += s.raw; return;
      }
    }
    if (n.is_object()) {
      const auto& items = n.object().items;
      if (items.empty()) {
        out_ += "{}";
        return;
      }
      out_ += '{';
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out_ += ',';
        newline(level + 1);
        out_ += json_string(items[i].key);
        out_ += indent_ >= 0 ? ": " : ":";
        value(items[i].value, level + 1);
      }
      newline(level);
      out_ += '}';
      return;
    }
    const auto& elements = n.list().elements;
    if (elements.empty()) {
      out_ += "[]";
      return;
    }
    out_ += '[';
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if (i) out_ += ',';
      newline(level + 1);
      value(elements[i], level + 1);
    }
    newline(level);
    out_ += ']';
  }

  std::string take() { return std::move(out_); }

 private:
  void newline(int level) {
    if (indent_ < 0) return;
    out_ += '\n';
    out_.append(static_cast<std::size_t>(indent_ * level), ' ');
  }

  int indent_;
  std::string out_;
};

}  // namespace

std::string llmon_to_json(const Document& doc, int indent) {
  if (doc.roots.size() != 1) {
    throw Error(ErrorCode::UntranslatableNode, "a JSON document needs exactly one root, found " +
                                                   std::to_string(doc.roots.size()));
  }
  const Node* root = &doc.roots.front();
  if (root->is_tagged()) {
    const UserTagged& t = root->tagged();
    if (t.children.size() != 1) {
      throw Error(ErrorCode::UntranslatableNode,
                  "wrapper tag '" + t.tag.to_string() + "' must hold exactly one value");
    }
    root = &t.children.front();
  }
  JsonWriter w(indent);
  w.value(*root, 0);
  return w.take();
}

// -- text to text -------------------------------------------------------------

Document parse_any(std::string_view text, Format format, const ConvertOptions& options) {
  const SpecialTokenRegistry& reg = options.registry ? *options.registry : default_registry();
  switch (format) {
    case Format::Llmon: return parse_surface(text, options.parse);
    case Format::Mrllmon: return parse_machine(text, reg, options.parse).document;
    case Format::Json: return json_to_llmon(text);
  }
  return {};
}

std::string convert(std::string_view text, Format from, Format to, const ConvertOptions& options) {
  const SpecialTokenRegistry& reg = options.registry ? *options.registry : default_registry();
  const Document doc = parse_any(text, from, options);
  switch (to) {
    case Format::Llmon: return print_surface(doc, options.print);
    case Format::Mrllmon: return print_machine(flatten(doc), reg, options.print);
    case Format::Json: return llmon_to_json(doc, options.json_indent);
  }
  return {};
}

}  // namespace llmon
