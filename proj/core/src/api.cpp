#include "llmon/api.hpp"

#include <nlohmann/json.hpp>

#include "llmon/analyze.hpp"
#include "llmon/error.hpp"
#include "llmon/mask.hpp"

namespace llmon::api {

namespace {

using ojson = nlohmann::ordered_json;

constexpr auto kReplace = nlohmann::json::error_handler_t::replace;

class TreeWriter {
 public:
  explicit TreeWriter(const Document& doc) : doc_(doc) {}

  ojson node(const Node& n) {
    ojson j;
    const std::uint32_t id = next_++;
    j["id"] = id;
    if (n.is_tagged()) {
      const UserTagged& t = n.tagged();
      j["type"] = "tag";
      j["tag"] = t.tag.to_string();
      j["self_closed"] = t.self_closed;
      ojson children = ojson::array();
      add_span(j, id);
      for (const Node& c : t.children) children.push_back(node(c));
      j["children"] = std::move(children);
    } else if (n.is_object()) {
      j["type"] = "object";
      add_span(j, id);
      ojson items = ojson::array();
      for (const ObjectItem& item : n.object().items) {
        ojson it;
        it["key"] = item.key;
        it["value"] = node(item.value);
        items.push_back(std::move(it));
      }
      j["items"] = std::move(items);
    } else if (n.is_list()) {
      j["type"] = "list";
      add_span(j, id);
      ojson elements = ojson::array();
      for (const Node& e : n.list().elements) elements.push_back(node(e));
      j["elements"] = std::move(elements);
    } else {
      const Scalar& s = n.scalar();
      j["type"] = "scalar";
      j["kind"] = to_string(s.kind);
      j["raw"] = s.raw;
      j["cast"] = s.cast_explicit;
      add_span(j, id);
    }
    return j;
  }

 private:
  void add_span(ojson& j, std::uint32_t id) const {
    if (id < doc_.source_spans.size() && doc_.source_spans[id]) {
      j["span"] = ojson::array({doc_.source_spans[id]->begin, doc_.source_spans[id]->end});
    }
  }

  const Document& doc_;
  std::uint32_t next_ = 0;
};

}  // namespace

std::string tree_json(const Document& doc) {
  TreeWriter w(doc);
  ojson roots = ojson::array();
  for (const Node& r : doc.roots) roots.push_back(w.node(r));
  ojson j;
  j["roots"] = std::move(roots);
  return j.dump(-1, ' ', false, kReplace);
}

std::string parse_tree_json(std::string_view text, Format format, const SpecialTokenRegistry& registry) {
  ConvertOptions opts;
  opts.registry = &registry;
  return tree_json(parse_any(text, format, opts));
}

std::string convert(std::string_view text, Format from, Format to, const SpecialTokenRegistry& registry) {
  ConvertOptions opts;
  opts.registry = &registry;
  return llmon::convert(text, from, to, opts);
}

std::string lint_json(std::string_view text, Format format, const SpecialTokenRegistry& registry) {
  ConvertOptions opts;
  opts.registry = &registry;
  return to_json_lines(lint(parse_any(text, format, opts)));
}

std::string tokenize_json(std::string_view text, const SpecialTokenRegistry& registry) {
  ojson out = ojson::array();
  for (const Token& t : tokenize(text, registry)) {
    ojson j;
    j["id"] = t.id;
    j["special"] = t.is_special;
    j["text"] = t.text;
    j["start"] = t.bytes.begin;
    j["end"] = t.bytes.end;
    out.push_back(std::move(j));
  }
  return out.dump(-1, ' ', false, kReplace);
}

std::string mask_json(std::string_view mrllmon_text, std::string_view exec_ref, std::string_view policy_json,
                      const SpecialTokenRegistry& registry) {
  const MaskPolicy policy = MaskPolicy::from_json(policy_json);
  const ParsedMachine parsed = parse_machine(mrllmon_text, registry);
  const auto cat = build_catalog(parsed.document);
  const auto exec = resolve_exec(parsed.document, cat.catalog);
  const auto wanted = TagPath::try_parse(trim(exec_ref));
  if (!wanted) throw Error(ErrorCode::UnknownReference, "'" + std::string(exec_ref) + "' is not a reference");
  for (const ExecBinding& b : exec.bindings) {
    if (b.exec_ref == wanted->to_string()) return compute_mask(parsed, b, policy).to_json();
  }
  std::string why;
  for (const Finding& f : exec.report.findings) why += "; " + f.code + ": " + f.message;
  throw Error(ErrorCode::UnknownReference,
              "no resolvable exec span '" + wanted->to_string() + "'" + why);
}

}  // namespace llmon::api
