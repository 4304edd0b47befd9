#pragma once

// Boundary-constrained attention masks over machine-form token sequences,
// plus a single-layer attention simulator for checking isolation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmon/analyze.hpp"
#include "llmon/machine.hpp"

namespace llmon {

enum class MaskMode { InstructionSelection, PromptRejection, Combined };
enum class MaskScope { GenerationOnly, Transitive };

std::string_view to_string(MaskMode m) noexcept;
std::string_view to_string(MaskScope s) noexcept;
std::optional<MaskMode> parse_mask_mode(std::string_view text) noexcept;
std::optional<MaskScope> parse_mask_scope(std::string_view text) noexcept;

struct MaskPolicy {
  MaskMode mode = MaskMode::InstructionSelection;
  bool mask_unselected_instr = true;
  bool mask_unbound_data = false;
  /// Masks text outside every tagged span.
  bool mask_untagged = false;
  std::vector<std::string> rejected_spans;
  MaskScope scope = MaskScope::Transitive;

  /// Reads `{"mode":..., "scope":..., "reject":[...], "mask_unselected_instr":...,
  /// "mask_unbound_data":..., "mask_untagged":...}`; missing keys keep defaults.
  /// Throws Error(InvalidPolicy).
  static MaskPolicy from_json(std::string_view json);
};

struct AttentionMask {
  std::size_t sequence_length = 0;
  /// Per prompt position: may generated tokens attend to it.
  std::vector<bool> visible;
  MaskScope scope = MaskScope::Transitive;

  std::vector<std::size_t> masked_positions() const;
  std::size_t masked_count() const;
  /// `{"len":n,"masked":[...],"scope":"..."}`.
  std::string to_json() const;
};

/// Visibility of each prompt token when generating for `binding`.
/// Delimiters of masked spans are masked with their content; the exec span
/// always stays visible. Throws Error(SpanNotInIndex | UnknownReference |
/// InvalidPolicy).
AttentionMask compute_mask(const ParsedMachine& parsed, const ExecBinding& binding, const MaskPolicy& policy,
                           const Vocabulary& vocab = default_vocabulary());

/// Dense causal mask over prompt + generated positions, stored as packed
/// 64-bit rows.
class MaskMatrix {
 public:
  MaskMatrix(std::size_t prompt_len, std::size_t generated_len);

  std::size_t size() const noexcept { return n_; }
  std::size_t prompt_length() const noexcept { return prompt_; }
  bool at(std::size_t q, std::size_t k) const;
  void set(std::size_t q, std::size_t k, bool v);
  /// One hex string per row, least significant bit = key 0.
  std::vector<std::string> hex_rows() const;

 private:
  std::size_t n_;
  std::size_t prompt_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Transitive scope hides masked keys from every query; generation-only
/// scope keeps prompt prefill plainly causal. Generated queries see the
/// visible prompt keys and all earlier generated keys.
MaskMatrix expand_matrix(const AttentionMask& mask, std::size_t generated_len);

inline constexpr std::size_t kSimDimension = 16;
/// Placeholder ids for generated positions start here.
inline constexpr std::uint64_t kGeneratedBase = std::uint64_t{1} << 48;

/// Deterministic value embedding of a token id.
std::vector<double> value_vector(std::uint64_t token_id, std::uint64_t seed);

/// Single-layer scaled dot-product attention over pseudo-random embeddings.
/// `token_ids` covers the prompt; generated positions use placeholder ids.
/// Masked entries get weight exactly zero. Returns one vector per query.
/// Throws Error(DimensionMismatch).
std::vector<std::vector<double>> simulate_attention(const std::vector<std::uint64_t>& token_ids,
                                                    const MaskMatrix& matrix, std::uint64_t seed);
std::vector<std::vector<double>> simulate_attention(const TokenSequence& tokens, const MaskMatrix& matrix,
                                                    std::uint64_t seed);

/// Softmax weights of one query row (zero where masked).
std::vector<double> attention_weights(const std::vector<std::uint64_t>& token_ids, const MaskMatrix& matrix,
                                      std::size_t query, std::uint64_t seed);

}  // namespace llmon
