#include "llmon/analyze.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <nlohmann/json.hpp>

namespace llmon {

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

std::size_t LintReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                [](const Finding& f) { return f.severity == Severity::Error; }));
}

std::size_t LintReport::count(std::string_view code) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; }));
}

void LintReport::sort() {
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    const std::uint64_t na = a.node ? a.node->value : UINT64_MAX;
    const std::uint64_t nb = b.node ? b.node->value : UINT64_MAX;
    if (na != nb) return na < nb;
    return a.code < b.code;
  });
}

void LintReport::append(const LintReport& other) {
  findings.insert(findings.end(), other.findings.begin(), other.findings.end());
}

std::string to_json_lines(const LintReport& report) {
  std::string out;
  for (const Finding& f : report.findings) {
    nlohmann::ordered_json j;
    j["severity"] = to_string(f.severity);
    j["code"] = f.code;
    j["message"] = f.message;
    j["node"] = f.node ? nlohmann::ordered_json(f.node->value) : nlohmann::ordered_json(nullptr);
    j["offset"] = f.bytes ? nlohmann::ordered_json::array({f.bytes->begin, f.bytes->end})
                          : nlohmann::ordered_json(nullptr);
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::string to_text(const LintReport& report) {
  std::string out;
  for (const Finding& f : report.findings) {
    out += std::string(to_string(f.severity)) + " " + f.code;
    if (f.node || f.bytes) {
      out += " [";
      if (f.node) out += "node " + std::to_string(f.node->value);
      if (f.node && f.bytes) out += ", ";
      if (f.bytes) out += "bytes " + std::to_string(f.bytes->begin) + ".." + std::to_string(f.bytes->end);
      out += "]";
    }
    out += ": " + f.message + "\n";
  }
  return out;
}

SpanKind classify_span(const TagPath& effective, const Vocabulary& vocab) {
  if (effective.empty()) return SpanKind::Other;
  const TagSegment& last = effective.back();
  if (effective.size() >= 2 && !last.instance &&
      effective.segments()[effective.size() - 2].name == vocab.exec_tag &&
      (last.name == vocab.exec_instr_child || last.name == vocab.exec_input_child)) {
    return SpanKind::ExecSlot;
  }
  if (last.name == vocab.exec_tag) return SpanKind::Exec;
  if (vocab.is_instruction(last.name)) return SpanKind::Instruction;
  if (vocab.is_data(last.name)) return SpanKind::Data;
  return SpanKind::Other;
}

std::optional<NodeId> SpanCatalog::find(std::string_view reference) const {
  const auto path = TagPath::try_parse(trim(reference));
  if (!path) return std::nullopt;
  const auto it = instances.find(path->to_string());
  if (it == instances.end()) return std::nullopt;
  return it->second;
}

namespace {

std::optional<ByteRange> bytes_of(const Document& doc, NodeId id) {
  if (id.value < doc.source_spans.size()) return doc.source_spans[id.value];
  return std::nullopt;
}

Finding make_finding(const Document& doc, Severity sev, std::string_view code, std::string message,
                     NodeId id) {
  return Finding{sev, std::string(code), std::move(message), id, bytes_of(doc, id)};
}

NodeId to_id(std::size_t i) { return NodeId{static_cast<std::uint32_t>(i)}; }

constexpr std::array<std::string_view, 11> kCastLikeTags = {
    "integer", "double", "number", "boolean", "str", "none", "nil", "char", "long", "short", "decimal"};

}  // namespace

CatalogResult build_catalog(const Document& doc, const Vocabulary& /*vocab*/) {
  CatalogResult out;
  const DocumentIndex idx(doc);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& e = idx.entries()[i];
    if (!e.effective_path) continue;
    const TagPath& path = *e.effective_path;
    out.catalog.by_head[path.front().name].push_back(to_id(i));
    if (!path.back().instance) continue;
    const std::string key = path.to_string();
    const auto [it, inserted] = out.catalog.instances.emplace(key, to_id(i));
    if (!inserted) {
      out.report.findings.push_back(make_finding(doc, Severity::Error, kDupInstance,
                                                 "instance '" + key + "' already defined at node " +
                                                     std::to_string(it->second.value),
                                                 to_id(i)));
    }
  }
  return out;
}

ExecResult resolve_exec(const Document& doc, const SpanCatalog& catalog, const Vocabulary& vocab) {
  ExecResult out;
  const DocumentIndex idx(doc);
  auto error = [&](std::string_view code, std::string message, NodeId at) {
    out.report.findings.push_back(make_finding(doc, Severity::Error, code, std::move(message), at));
  };

  // Reads the reference held by a slot span; reports and returns nullopt
  // when the slot does not hold exactly one tag-path-shaped text.
  auto read_ref = [&](NodeId slot) -> std::optional<TagPath> {
    const Node& n = *idx[slot].node;
    const auto& children = n.tagged().children;
    if (children.size() != 1 || !children.front().is_scalar()) {
      error(kMalformedRef, "reference slot must hold exactly one instance reference", slot);
      return std::nullopt;
    }
    auto path = TagPath::try_parse(trim(children.front().scalar().raw));
    if (!path) {
      error(kMalformedRef, "'" + children.front().scalar().raw + "' is not an instance reference", slot);
    }
    return path;
  };

  auto resolve = [&](const TagPath& ref, NodeId slot, bool want_instruction) -> std::optional<NodeId> {
    const std::string text = ref.to_string();
    const auto it = catalog.instances.find(text);
    if (it == catalog.instances.end()) {
      error(kDanglingRef, "reference '" + text + "' does not name any instance", slot);
      return std::nullopt;
    }
    const auto& target = idx[it->second];
    const SpanKind kind =
        target.effective_path ? classify_span(*target.effective_path, vocab) : SpanKind::Other;
    if (want_instruction && kind != SpanKind::Instruction) {
      error(kBadTargetKind, "'" + text + "' is not an instruction", slot);
      return std::nullopt;
    }
    if (!want_instruction && (kind == SpanKind::Exec || kind == SpanKind::ExecSlot)) {
      error(kBadTargetKind, "'" + text + "' is an exec span and cannot be an input", slot);
      return std::nullopt;
    }
    return it->second;
  };

  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& e = idx.entries()[i];
    if (!e.effective_path || classify_span(*e.effective_path, vocab) != SpanKind::Exec) continue;
    const TagPath& exec_path = *e.effective_path;
    const NodeId exec_id = to_id(i);

    std::vector<NodeId> instr_slots;
    std::vector<NodeId> input_slots;
    for (NodeId c : idx.children(exec_id)) {
      const auto& ce = idx[c];
      if (!ce.effective_path) continue;
      const TagPath& cp = *ce.effective_path;
      if (cp.size() != exec_path.size() + 1 || !cp.starts_with(exec_path) || cp.back().instance) continue;
      if (cp.back().name == vocab.exec_instr_child) instr_slots.push_back(c);
      if (cp.back().name == vocab.exec_input_child) input_slots.push_back(c);
    }

    const std::string exec_ref = exec_path.to_string();
    if (instr_slots.empty()) {
      error(kMissingInstr, "exec '" + exec_ref + "' names no instruction", exec_id);
      continue;
    }
    if (instr_slots.size() > 1) {
      error(kMultipleInstr, "exec '" + exec_ref + "' names more than one instruction", exec_id);
      continue;
    }

    bool ok = true;
    ExecBinding b;
    b.exec_node = exec_id;
    b.exec_ref = exec_ref;
    if (auto ref = read_ref(instr_slots.front())) {
      b.instr_ref = ref->to_string();
      if (auto target = resolve(*ref, instr_slots.front(), true)) {
        b.resolved_instr = *target;
      } else {
        ok = false;
      }
    } else {
      ok = false;
    }
    for (NodeId slot : input_slots) {
      auto ref = read_ref(slot);
      if (!ref) {
        ok = false;
        continue;
      }
      b.input_refs.push_back(ref->to_string());
      if (auto target = resolve(*ref, slot, false)) {
        b.resolved_inputs.push_back(*target);
      } else {
        ok = false;
      }
    }
    if (ok) out.bindings.push_back(std::move(b));
  }
  return out;
}

LintReport lint(const Document& doc, const Vocabulary& vocab) {
  auto cat = build_catalog(doc, vocab);
  LintReport report = std::move(cat.report);
  report.append(resolve_exec(doc, cat.catalog, vocab).report);

  const DocumentIndex idx(doc);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& e = idx.entries()[i];
    const Node& n = *e.node;
    if (e.flatten_conflict) {
      const auto& anc = idx[*e.tagged_parent];
      report.findings.push_back(make_finding(
          doc, Severity::Error, kFlattenInconsistent,
          "tag '" + n.tagged().tag.to_string() + "' disagrees with enclosing '" +
              (anc.effective_path ? anc.effective_path->to_string() : std::string("?")) + "'",
          to_id(i)));
    }
    if (n.is_object()) {
      std::set<std::string_view> seen;
      for (const ObjectItem& item : n.object().items) {
        if (!seen.insert(item.key).second) {
          report.findings.push_back(make_finding(doc, Severity::Warning, kDupObjectKey,
                                                 "object key '" + item.key + "' repeats", to_id(i)));
        }
      }
    }
    if (n.is_tagged()) {
      const UserTagged& t = n.tagged();
      if (t.tag.size() == 1 && !t.tag.front().instance && t.children.size() == 1 &&
          t.children.front().is_scalar() &&
          std::find(kCastLikeTags.begin(), kCastLikeTags.end(), t.tag.front().name) != kCastLikeTags.end()) {
        report.findings.push_back(make_finding(
            doc, Severity::Warning, kUnknownCastTag,
            "'" + t.tag.front().name + "' is not a cast tag; use int, float, bool, string or null", to_id(i)));
      }
    }
  }
  report.sort();
  return report;
}

}  // namespace llmon
