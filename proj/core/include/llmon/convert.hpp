#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "llmon/machine.hpp"
#include "llmon/model.hpp"
#include "llmon/syntax.hpp"

namespace llmon {

enum class Format { Llmon, Mrllmon, Json };

std::string_view to_string(Format f) noexcept;
/// Accepts `llmon`, `mrllmon` and `json`.
std::optional<Format> parse_format(std::string_view name) noexcept;

/// Rewrites every nested user tag to its full dotted path. Object and List
/// containers are transparent. Idempotent. Throws Error(FlattenConflict).
Document flatten(const Document& doc);

/// Surface text to machine text, flattening nested tags on the way.
std::string surface_to_machine(std::string_view input, const SpecialTokenRegistry& registry = default_registry(),
                               const PrintOptions& options = {});

/// Machine text to surface text. Dotted tag names stay dotted.
std::string machine_to_surface(std::string_view input, const SpecialTokenRegistry& registry = default_registry(),
                               const PrintOptions& options = {});

/// JSON objects become Object nodes, arrays List nodes, numbers `int` or
/// `float` casts, booleans `bool` casts and null a `null` cast. Duplicate
/// keys are kept in order. Throws Error(InvalidJson).
Document json_to_llmon(std::string_view json_text);

/// Inverse of json_to_llmon. Accepts documents made of a single Object,
/// List or Scalar root, optionally wrapped in one user tag holding exactly
/// one child. Throws Error(UntranslatableNode). `indent` < 0 is compact.
std::string llmon_to_json(const Document& doc, int indent = -1);

struct ConvertOptions {
  const SpecialTokenRegistry* registry = nullptr;
  PrintOptions print;
  ParseOptions parse;
  int json_indent = -1;
};

/// Text-to-text conversion between any two formats. Conversions into the
/// machine form flatten nested tags.
std::string convert(std::string_view text, Format from, Format to, const ConvertOptions& options = {});

/// Parses text in any format into a Document.
Document parse_any(std::string_view text, Format format, const ConvertOptions& options = {});

}  // namespace llmon
