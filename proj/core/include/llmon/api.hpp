#pragma once

// Text-in/text-out entry points. The command-line tool is a thin shell over
// these, so any other front end calling them produces identical bytes.

#include <string>
#include <string_view>

#include "llmon/convert.hpp"
#include "llmon/machine.hpp"
#include "llmon/model.hpp"

namespace llmon::api {

/// `{"roots":[...]}` with one object per node (id, type, span, ...).
std::string parse_tree_json(std::string_view text, Format format, const SpecialTokenRegistry& registry = default_registry());

/// Same as llmon::convert with default options.
std::string convert(std::string_view text, Format from, Format to,
                    const SpecialTokenRegistry& registry = default_registry());

/// Lint findings as JSON lines (empty string when clean).
std::string lint_json(std::string_view text, Format format, const SpecialTokenRegistry& registry = default_registry());

/// `[{"id":..,"special":..,"text":..,"start":..,"end":..}, ...]`.
std::string tokenize_json(std::string_view text, const SpecialTokenRegistry& registry = default_registry());

/// Mask for the exec span `exec_ref` of a machine-form document. The policy
/// is JSON (see MaskPolicy::from_json); an empty string selects defaults.
std::string mask_json(std::string_view mrllmon_text, std::string_view exec_ref, std::string_view policy_json,
                      const SpecialTokenRegistry& registry = default_registry());

/// Serializes a parsed document the way parse_tree_json does.
std::string tree_json(const Document& doc);

}  // namespace llmon::api
