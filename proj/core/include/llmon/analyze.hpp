#pragma once

// Static checks over a Document: instance catalog, exec-binding resolution
// and the linter.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmon/model.hpp"

namespace llmon {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s) noexcept;

// Finding codes.
inline constexpr std::string_view kDupInstance = "DUP_INSTANCE";
inline constexpr std::string_view kDanglingRef = "DANGLING_REF";
inline constexpr std::string_view kMissingInstr = "MISSING_INSTR";
inline constexpr std::string_view kMultipleInstr = "MULTIPLE_INSTR";
inline constexpr std::string_view kMalformedRef = "MALFORMED_REF";
inline constexpr std::string_view kBadTargetKind = "BAD_TARGET_KIND";
inline constexpr std::string_view kFlattenInconsistent = "FLATTEN_INCONSISTENT";
inline constexpr std::string_view kDupObjectKey = "DUP_OBJECT_KEY";
inline constexpr std::string_view kUnknownCastTag = "UNKNOWN_CAST_TAG";

struct Finding {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  std::optional<NodeId> node;
  std::optional<ByteRange> bytes;
};

struct LintReport {
  std::vector<Finding> findings;

  std::size_t error_count() const noexcept;
  std::size_t count(std::string_view code) const noexcept;
  bool has_errors() const noexcept { return error_count() > 0; }
  /// Orders findings by node, then code.
  void sort();
  void append(const LintReport& other);
};

/// One finding per line: {"severity","code","message","node","offset"}.
std::string to_json_lines(const LintReport& report);
/// `severity CODE [node N, bytes b..e]: message` per line.
std::string to_text(const LintReport& report);

/// How a span participates in exec semantics, judged from its flattened path.
enum class SpanKind { Instruction, Data, Exec, ExecSlot, Other };

SpanKind classify_span(const TagPath& effective, const Vocabulary& vocab = default_vocabulary());

struct SpanCatalog {
  /// Flattened path text of every span whose last segment carries an
  /// instance (`instr:b`, `email.attachments.attachment:1`).
  std::map<std::string, NodeId, std::less<>> instances;
  /// First segment name to every tagged span with that head.
  std::map<std::string, std::vector<NodeId>, std::less<>> by_head;

  std::optional<NodeId> find(std::string_view reference) const;
};

struct CatalogResult {
  SpanCatalog catalog;
  LintReport report;
};

CatalogResult build_catalog(const Document& doc, const Vocabulary& vocab = default_vocabulary());

struct ExecBinding {
  NodeId exec_node;
  std::string exec_ref;
  std::string instr_ref;
  std::vector<std::string> input_refs;
  NodeId resolved_instr;
  std::vector<NodeId> resolved_inputs;
};

struct ExecResult {
  std::vector<ExecBinding> bindings;
  LintReport report;
};

/// Resolves every exec span's `.instr` / `.input` children against the
/// catalog. Broken bindings are reported and left out.
ExecResult resolve_exec(const Document& doc, const SpanCatalog& catalog,
                        const Vocabulary& vocab = default_vocabulary());

/// Runs every check; findings are sorted.
LintReport lint(const Document& doc, const Vocabulary& vocab = default_vocabulary());

}  // namespace llmon
