#pragma once

// LLMON-structured training records and distractor benchmark instances.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "llmon/machine.hpp"
#include "llmon/model.hpp"

namespace llmon {

struct SftRecord {
  std::string instruction;
  std::optional<std::string> input;
  std::string output;
};

/// JSONL field names for reading instruction corpora.
struct FieldNames {
  std::string instruction = "instruction";
  std::string input = "input";
  std::string output = "output";
};

/// One record per non-blank line. Empty `input` strings count as absent.
/// Throws Error(InvalidRecord) with the line number.
std::vector<SftRecord> read_pool_jsonl(std::istream& in, const FieldNames& fields = {});
std::vector<SftRecord> read_pool_jsonl(const std::filesystem::path& path, const FieldNames& fields = {});

struct InstanceIds {
  std::string instr = "a";
  std::string data = "1";
  std::string exec = "x";
};

/// Wraps the instruction as `instr:<id>`, the input (if any) as `data:<id>`,
/// and appends `exec:<id>` binding them. The output is not embedded.
Document llmonize(const SftRecord& record, const InstanceIds& ids = {});

struct DistractorInstance {
  Document document;
  std::string focus_ref;
  std::vector<std::string> distractor_refs;
  std::string expected_output;
  std::uint64_t seed = 0;
};

/// Short labels in sample order: a..z, a1..z1, a2..
std::string instance_label(std::size_t index);

/// One focus instruction plus `k` distractors drawn from `pool` and laid
/// out in a seeded random order, followed by an exec span selecting the
/// focus. Throws Error(PoolTooSmall).
DistractorInstance make_distractor_instance(const std::vector<SftRecord>& pool, std::size_t k,
                                            std::uint64_t seed);

/// `count` instances; instance i uses k = k_min + (i mod (k_max - k_min + 1))
/// and a seed derived from (seed, i).
std::vector<DistractorInstance> make_distractor_set(const std::vector<SftRecord>& pool, std::size_t count,
                                                    std::size_t k_min, std::size_t k_max, std::uint64_t seed);

/// `{"mrllmon","llmon","focus","distractors","expected_output","seed"}`.
std::string instance_to_json(const DistractorInstance& inst,
                             const SpecialTokenRegistry& registry = default_registry());

/// Writes one JSON line per instance. Throws Error(IoError) naming the path.
void emit_dataset(const std::vector<DistractorInstance>& instances, const std::filesystem::path& path,
                  const SpecialTokenRegistry& registry = default_registry());

/// Deterministic 64-bit mixer used for seed derivation.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace llmon
