#include "oracles.hpp"

#include <cstdio>
#include <regex>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace llmon::testing {

namespace {

const char* kind_name(ScalarKind k) {
  switch (k) {
    case ScalarKind::String: return "str";
    case ScalarKind::Integer: return "int";
    case ScalarKind::Float: return "float";
    case ScalarKind::Boolean: return "bool";
    case ScalarKind::Null: return "null";
  }
  return "?";
}

void quote(std::string& out, std::string_view s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

void canon(const Node& n, std::string& out) {
  if (const auto* t = std::get_if<UserTagged>(&n.value)) {
    out += "(tag [";
    for (const TagSegment& s : t->tag.segments()) {
      out += ' ';
      quote(out, s.name);
      if (s.instance) {
        out += ':';
        quote(out, *s.instance);
      }
    }
    out += t->self_closed ? " ] /" : " ]";
    for (const Node& c : t->children) {
      out += ' ';
      canon(c, out);
    }
    out += ')';
  } else if (const auto* o = std::get_if<Object>(&n.value)) {
    out += "(obj";
    for (const ObjectItem& item : o->items) {
      out += " (";
      quote(out, item.key);
      out += ' ';
      canon(item.value, out);
      out += ')';
    }
    out += ')';
  } else if (const auto* l = std::get_if<List>(&n.value)) {
    out += "(list";
    for (const Node& e : l->elements) {
      out += ' ';
      canon(e, out);
    }
    out += ')';
  } else {
    const Scalar& s = std::get<Scalar>(n.value);
    out += '(';
    out += kind_name(s.kind);
    out += ' ';
    quote(out, s.raw);
    out += ')';
  }
}

class EventRecorder : public nlohmann::json_sax<nlohmann::json> {
 public:
  std::vector<std::string> events;

  bool null() override { return add("null"); }
  bool boolean(bool v) override { return add(v ? "true" : "false"); }
  bool number_integer(number_integer_t v) override { return add("int " + std::to_string(v)); }
  bool number_unsigned(number_unsigned_t v) override { return add("int " + std::to_string(v)); }
  bool number_float(number_float_t v, const string_t&) override {
    char buf[64];
    std::snprintf(buf, sizeof buf, "float %a", v);
    return add(buf);
  }
  bool string(string_t& v) override { return add("str " + v); }
  bool binary(binary_t&) override { return false; }
  bool start_object(std::size_t) override { return add("{"); }
  bool key(string_t& v) override { return add("key " + v); }
  bool end_object() override { return add("}"); }
  bool start_array(std::size_t) override { return add("["); }
  bool end_array() override { return add("]"); }
  bool parse_error(std::size_t pos, const std::string&, const nlohmann::detail::exception& e) override {
    throw std::runtime_error("bad JSON at " + std::to_string(pos) + ": " + e.what());
  }

 private:
  bool add(std::string e) {
    events.push_back(std::move(e));
    return true;
  }
};

void stats(const Node& n, TreeStats& s) {
  ++s.nodes;
  if (const auto* t = std::get_if<UserTagged>(&n.value)) {
    ++s.tagged;
    for (const Node& c : t->children) stats(c, s);
  } else if (const auto* o = std::get_if<Object>(&n.value)) {
    for (const ObjectItem& i : o->items) stats(i.value, s);
  } else if (const auto* l = std::get_if<List>(&n.value)) {
    for (const Node& e : l->elements) stats(e, s);
  }
}

}  // namespace

std::string canonical(const Node& n) {
  std::string out;
  canon(n, out);
  return out;
}

std::string canonical(const Document& d) {
  std::string out = "(doc";
  for (const Node& r : d.roots) {
    out += ' ';
    canon(r, out);
  }
  return out + ')';
}

std::vector<std::string> json_events(std::string_view json_text) {
  EventRecorder rec;
  nlohmann::json::sax_parse(json_text.begin(), json_text.end(), &rec);
  return rec.events;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty() || needle.size() > haystack.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    if (haystack.compare(i, needle.size(), needle) == 0) ++n;
  }
  return n;
}

std::string normalize_machine(std::string_view text) {
  static const std::regex ws("[ \\t\\r\\n]+");
  static const std::regex around(" ?(<\\|(?:open|open_end|close|self_close|\\.|:|list-separator)\\|>) ?");
  std::string s = std::regex_replace(std::string(text), ws, " ");
  s = std::regex_replace(s, around, "$1");
  // A leading or trailing blank can survive when the text starts or ends
  // with ordinary words.
  if (!s.empty() && s.front() == ' ') s.erase(0, 1);
  if (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string escape_text(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '\\' || c == '/') out += '\\';
    out += c;
  }
  return out;
}

const std::vector<std::string>& default_specials() {
  static const std::vector<std::string> s = {"<|open|>", "<|open_end|>", "<|close|>", "<|self_close|>",
                                             "<|.|>",    "<|:|>",        "<|list-separator|>"};
  return s;
}

std::string random_machine_noise(std::mt19937_64& rng, std::size_t pieces) {
  static const std::vector<std::string> fragments = {
      "<|", "|>", "<|open", "open|>", "<|close", "<||>", "<|open_end", "|", "<", ">", "<<|open|>>",
      "<|.:|>", "<|list-separator", "<|self_close|", "_end|>"};
  static const std::vector<std::string> words = {"alpha", "Tokyo", "12 + 8", "a.b:c", "email", "x,y",
                                                 "café",  "日本",   "\\slash/", "end."};
  static const std::vector<std::string> spaces = {" ", "  ", "\n", "\t", " \n "};
  std::string out;
  for (std::size_t i = 0; i < pieces; ++i) {
    switch (rng() % 4) {
      case 0: out += default_specials()[rng() % default_specials().size()]; break;
      case 1: out += fragments[rng() % fragments.size()]; break;
      case 2: out += words[rng() % words.size()]; break;
      default: out += spaces[rng() % spaces.size()]; break;
    }
  }
  return out;
}

TreeStats tree_stats(const Document& d) {
  TreeStats s;
  for (const Node& r : d.roots) stats(r, s);
  return s;
}

std::string join_segments(const std::vector<TagSegment>& segs) {
  std::string out;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) out += '.';
    out += segs[i].name;
    if (segs[i].instance) out += ':' + *segs[i].instance;
  }
  return out;
}

std::optional<std::pair<std::size_t, std::size_t>> scan_span(const std::vector<std::string>& toks,
                                                             const std::string& tag) {
  auto tag_at = [&](std::size_t i, std::size_t& after) {
    std::string text;
    std::size_t j = i;
    while (j < toks.size() && toks[j] != "<|close|>" && toks[j] != "<|self_close|>") text += toks[j++];
    after = j;
    return text;
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::size_t after = 0;
    if (toks[i] != "<|open|>" || tag_at(i + 1, after) != tag || after >= toks.size()) continue;
    if (toks[after] == "<|self_close|>") return std::pair{i, after};
    for (std::size_t k = after; k < toks.size(); ++k) {
      std::size_t end = 0;
      if (toks[k] == "<|open_end|>" && tag_at(k + 1, end) == tag && end < toks.size()) return std::pair{i, end};
    }
  }
  return std::nullopt;
}

}  // namespace llmon::testing
