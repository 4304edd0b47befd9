#include "llmon/datagen.hpp"

#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "llmon/error.hpp"
#include "llmon/surface.hpp"

namespace llmon {

namespace {

// Unbiased draw from [0, bound) by rejection; std::uniform_int_distribution
// is implementation-defined, which would make datasets differ across
// standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

bool coin(std::mt19937_64& rng) { return (rng() >> 63) != 0; }

std::string clean_text(std::string_view text, const char* what) {
  const std::string_view t = trim(text);
  if (t.empty()) throw Error(ErrorCode::InvalidRecord, std::string(what) + " is empty");
  return std::string(t);
}

Node text_span(const std::string& tag, std::string text) {
  return make_tagged(TagPath::parse(tag), {make_scalar(std::move(text))});
}

Node exec_span(const std::string& exec_id, const std::string& instr_ref,
               const std::optional<std::string>& data_ref) {
  const std::string base = "exec:" + exec_id;
  std::vector<Node> children;
  children.push_back(text_span(base + ".instr", instr_ref));
  if (data_ref) children.push_back(text_span(base + ".input", *data_ref));
  return make_tagged(TagPath::parse(base), std::move(children));
}

std::optional<std::string> optional_text(const nlohmann::json& j, const std::string& field, std::size_t line) {
  const auto it = j.find(field);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::InvalidRecord, "line " + std::to_string(line) + ": '" + field + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<SftRecord> read_pool_jsonl(std::istream& in, const FieldNames& fields) {
  std::vector<SftRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidRecord, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::InvalidRecord, "line " + std::to_string(line_no) + ": expected a JSON object");
    }
    SftRecord r;
    auto instruction = optional_text(j, fields.instruction, line_no);
    if (!instruction || trim(*instruction).empty()) {
      throw Error(ErrorCode::InvalidRecord,
                  "line " + std::to_string(line_no) + ": missing '" + fields.instruction + "'");
    }
    r.instruction = std::move(*instruction);
    r.input = optional_text(j, fields.input, line_no);
    if (r.input && trim(*r.input).empty()) r.input.reset();
    r.output = optional_text(j, fields.output, line_no).value_or("");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SftRecord> read_pool_jsonl(const std::filesystem::path& path, const FieldNames& fields) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return read_pool_jsonl(in, fields);
}

Document llmonize(const SftRecord& record, const InstanceIds& ids) {
  Document doc;
  doc.roots.push_back(text_span("instr:" + ids.instr, clean_text(record.instruction, "instruction")));
  std::optional<std::string> data_ref;
  if (record.input && !trim(*record.input).empty()) {
    data_ref = "data:" + ids.data;
    doc.roots.push_back(text_span(*data_ref, clean_text(*record.input, "input")));
  }
  doc.roots.push_back(exec_span(ids.exec, "instr:" + ids.instr, data_ref));
  return doc;
}

std::string instance_label(std::size_t index) {
  std::string out(1, static_cast<char>('a' + index % 26));
  if (index >= 26) out += std::to_string(index / 26);
  return out;
}

DistractorInstance make_distractor_instance(const std::vector<SftRecord>& pool, std::size_t k,
                                            std::uint64_t seed) {
  if (pool.size() < k + 1) {
    throw Error(ErrorCode::PoolTooSmall, "need " + std::to_string(k + 1) + " records, pool has " +
                                             std::to_string(pool.size()));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks(pool.size());
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  shuffle(picks, rng);
  picks.resize(k + 1);
  const std::size_t focus = picks.front();

  std::vector<std::size_t> order = picks;
  shuffle(order, rng);

  DistractorInstance inst;
  inst.seed = seed;
  inst.expected_output = pool[focus].output;

  Document& doc = inst.document;
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    const std::string ref = "instr:" + instance_label(slot);
    doc.roots.push_back(text_span(ref, clean_text(pool[order[slot]].instruction, "instruction")));
    if (order[slot] == focus) {
      inst.focus_ref = ref;
    } else {
      inst.distractor_refs.push_back(ref);
    }
  }

  // Bound input of the focus, plus (half the time) an unrelated input taken
  // from a distractor and left unbound.
  std::optional<std::string> bound_text;
  if (pool[focus].input) bound_text = clean_text(*pool[focus].input, "input");
  std::optional<std::string> unbound_text;
  const bool add_unbound = coin(rng);
  std::vector<std::size_t> with_input;
  for (std::size_t p : picks) {
    if (p != focus && pool[p].input) with_input.push_back(p);
  }
  if (add_unbound && !with_input.empty()) {
    unbound_text = clean_text(*pool[with_input[uniform_below(rng, with_input.size())]].input, "input");
  }
  const bool unbound_first = coin(rng);

  std::vector<std::pair<std::string, bool>> data;  // text, bound
  if (bound_text) data.emplace_back(*bound_text, true);
  if (unbound_text) {
    if (unbound_first) {
      data.insert(data.begin(), {*unbound_text, false});
    } else {
      data.emplace_back(*unbound_text, false);
    }
  }
  std::optional<std::string> data_ref;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::string ref = "data:" + std::to_string(i + 1);
    doc.roots.push_back(text_span(ref, data[i].first));
    if (data[i].second) data_ref = ref;
  }
  doc.roots.push_back(exec_span("x", inst.focus_ref, data_ref));
  return inst;
}

std::vector<DistractorInstance> make_distractor_set(const std::vector<SftRecord>& pool, std::size_t count,
                                                    std::size_t k_min, std::size_t k_max, std::uint64_t seed) {
  if (k_max < k_min) std::swap(k_min, k_max);
  std::vector<DistractorInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = k_min + i % (k_max - k_min + 1);
    out.push_back(make_distractor_instance(pool, k, derive_seed(seed, i)));
  }
  return out;
}

std::string instance_to_json(const DistractorInstance& inst, const SpecialTokenRegistry& registry) {
  nlohmann::ordered_json j;
  j["mrllmon"] = print_machine(inst.document, registry);
  j["llmon"] = print_surface(inst.document);
  j["focus"] = inst.focus_ref;
  j["distractors"] = inst.distractor_refs;
  j["expected_output"] = inst.expected_output;
  j["seed"] = inst.seed;
  try {
    return j.dump();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, e.what());
  }
}

void emit_dataset(const std::vector<DistractorInstance>& instances, const std::filesystem::path& path,
                  const SpecialTokenRegistry& registry) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  for (const DistractorInstance& inst : instances) out << instance_to_json(inst, registry) << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace llmon
