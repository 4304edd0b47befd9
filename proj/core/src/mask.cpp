#include "llmon/mask.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "llmon/error.hpp"

namespace llmon {

std::string_view to_string(MaskMode m) noexcept {
  switch (m) {
    case MaskMode::InstructionSelection: return "instruction_selection";
    case MaskMode::PromptRejection: return "prompt_rejection";
    case MaskMode::Combined: return "combined";
  }
  return "instruction_selection";
}

std::string_view to_string(MaskScope s) noexcept {
  return s == MaskScope::Transitive ? "transitive" : "generation_only";
}

std::optional<MaskMode> parse_mask_mode(std::string_view text) noexcept {
  if (text == "instruction_selection") return MaskMode::InstructionSelection;
  if (text == "prompt_rejection") return MaskMode::PromptRejection;
  if (text == "combined") return MaskMode::Combined;
  return std::nullopt;
}

std::optional<MaskScope> parse_mask_scope(std::string_view text) noexcept {
  if (text == "transitive") return MaskScope::Transitive;
  if (text == "generation_only") return MaskScope::GenerationOnly;
  return std::nullopt;
}

MaskPolicy MaskPolicy::from_json(std::string_view json) {
  MaskPolicy p;
  if (trim(json).empty()) return p;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidPolicy, std::string("policy is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidPolicy, "policy must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      if (k == "mode") {
        auto m = parse_mask_mode(it->get<std::string>());
        if (!m) throw Error(ErrorCode::InvalidPolicy, "unknown mode '" + it->get<std::string>() + "'");
        p.mode = *m;
      } else if (k == "scope") {
        auto s = parse_mask_scope(it->get<std::string>());
        if (!s) throw Error(ErrorCode::InvalidPolicy, "unknown scope '" + it->get<std::string>() + "'");
        p.scope = *s;
      } else if (k == "reject" || k == "rejected_spans") {
        p.rejected_spans = it->get<std::vector<std::string>>();
      } else if (k == "mask_unselected_instr") {
        p.mask_unselected_instr = it->get<bool>();
      } else if (k == "mask_unbound_data") {
        p.mask_unbound_data = it->get<bool>();
      } else if (k == "mask_untagged") {
        p.mask_untagged = it->get<bool>();
      } else {
        throw Error(ErrorCode::InvalidPolicy, "unknown policy key '" + k + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidPolicy, std::string("bad policy value: ") + e.what());
  }
  return p;
}

std::vector<std::size_t> AttentionMask::masked_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < visible.size(); ++i) {
    if (!visible[i]) out.push_back(i);
  }
  return out;
}

std::size_t AttentionMask::masked_count() const {
  std::size_t n = 0;
  for (bool v : visible) n += v ? 0 : 1;
  return n;
}

std::string AttentionMask::to_json() const {
  nlohmann::ordered_json j;
  j["len"] = sequence_length;
  j["masked"] = masked_positions();
  j["scope"] = to_string(scope);
  return j.dump();
}

AttentionMask compute_mask(const ParsedMachine& parsed, const ExecBinding& binding, const MaskPolicy& policy,
                           const Vocabulary& vocab) {
  const Document& doc = parsed.document;
  const TokenSequence& ts = parsed.tokens;
  const std::size_t n = ts.tokens.size();

  auto range_of = [&](NodeId id) -> TokenRange {
    auto r = ts.span(id);
    if (!r || r->last >= n) {
      throw Error(ErrorCode::SpanNotInIndex, "node " + std::to_string(id.value) + " has no token span");
    }
    return *r;
  };

  const bool selecting = policy.mode != MaskMode::PromptRejection;
  const bool rejecting = policy.mode != MaskMode::InstructionSelection;
  if (rejecting && policy.rejected_spans.empty()) {
    throw Error(ErrorCode::InvalidPolicy, "prompt rejection needs at least one rejected span");
  }

  const TokenRange exec_range = range_of(binding.exec_node);
  const TokenRange instr_range = range_of(binding.resolved_instr);
  std::vector<TokenRange> input_ranges;
  for (NodeId id : binding.resolved_inputs) input_ranges.push_back(range_of(id));

  const DocumentIndex idx(doc);
  std::vector<bool> tagged(n, false);
  std::vector<bool> masked(n, false);
  std::vector<bool> rejected(n, false);
  auto mark = [](std::vector<bool>& v, TokenRange r) {
    for (std::size_t i = r.first; i <= r.last; ++i) v[i] = true;
  };

  const auto inputs_contain = [&](NodeId id) {
    for (NodeId b : binding.resolved_inputs) {
      if (b == id) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& e = idx.entries()[i];
    if (!e.node->is_tagged()) continue;
    const NodeId id{static_cast<std::uint32_t>(i)};
    const TokenRange r = range_of(id);
    mark(tagged, r);
    if (!e.effective_path) continue;
    const SpanKind kind = classify_span(*e.effective_path, vocab);
    if (selecting && policy.mask_unselected_instr && kind == SpanKind::Instruction &&
        id != binding.resolved_instr) {
      mark(masked, r);
    }
    if (policy.mask_unbound_data && kind == SpanKind::Data && !inputs_contain(id)) mark(masked, r);
  }
  if (policy.mask_untagged) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!tagged[i]) masked[i] = true;
    }
  }
  if (rejecting) {
    const auto cat = build_catalog(doc, vocab);
    for (const std::string& ref : policy.rejected_spans) {
      const auto id = cat.catalog.find(ref);
      if (!id) throw Error(ErrorCode::UnknownReference, "rejected span '" + ref + "' is not an instance");
      mark(rejected, range_of(*id));
    }
  }

  std::vector<bool> keep(n, false);
  mark(keep, instr_range);
  for (const TokenRange& r : input_ranges) mark(keep, r);

  AttentionMask out;
  out.sequence_length = n;
  out.scope = policy.scope;
  out.visible.assign(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    bool hidden = masked[i] && !keep[i];
    if (rejected[i]) hidden = true;
    if (i >= exec_range.first && i <= exec_range.last) hidden = false;
    out.visible[i] = !hidden;
  }
  return out;
}

// -- matrix -------------------------------------------------------------------

MaskMatrix::MaskMatrix(std::size_t prompt_len, std::size_t generated_len)
    : n_(prompt_len + generated_len), prompt_(prompt_len), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {}

bool MaskMatrix::at(std::size_t q, std::size_t k) const {
  return (bits_[q * words_ + k / 64] >> (k % 64)) & 1u;
}

void MaskMatrix::set(std::size_t q, std::size_t k, bool v) {
  std::uint64_t& w = bits_[q * words_ + k / 64];
  const std::uint64_t bit = std::uint64_t{1} << (k % 64);
  w = v ? (w | bit) : (w & ~bit);
}

std::vector<std::string> MaskMatrix::hex_rows() const {
  std::vector<std::string> rows;
  rows.reserve(n_);
  for (std::size_t q = 0; q < n_; ++q) {
    std::string row;
    // Most significant word first so the string reads as one big number.
    for (std::size_t w = words_; w-- > 0;) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits_[q * words_ + w]));
      row += buf;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MaskMatrix expand_matrix(const AttentionMask& mask, std::size_t generated_len) {
  const std::size_t p = mask.sequence_length;
  MaskMatrix m(p, generated_len);
  for (std::size_t q = 0; q < m.size(); ++q) {
    const bool generated_row = q >= p;
    for (std::size_t k = 0; k <= q; ++k) {
      bool v = true;
      if (k < p && !mask.visible[k]) v = !generated_row && mask.scope == MaskScope::GenerationOnly;
      m.set(q, k, v);
    }
  }
  return m;
}

// -- simulator ----------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::vector<double> embedding(std::uint64_t id, std::uint64_t seed, std::uint64_t stream) {
  std::vector<double> v(kSimDimension);
  std::uint64_t state = splitmix64(splitmix64(id) ^ splitmix64(seed + 0x632be59bd9b4e019ull * (stream + 1)));
  for (std::size_t j = 0; j < kSimDimension; ++j) {
    state = splitmix64(state);
    // Top 53 bits to [0,1), then to [-1,1).
    v[j] = static_cast<double>(state >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return v;
}

std::uint64_t id_at(const std::vector<std::uint64_t>& ids, std::size_t pos) {
  return pos < ids.size() ? ids[pos] : kGeneratedBase + (pos - ids.size());
}

void check_dims(const std::vector<std::uint64_t>& ids, const MaskMatrix& m) {
  if (m.prompt_length() != ids.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix covers " + std::to_string(m.prompt_length()) +
                                                  " prompt positions but there are " +
                                                  std::to_string(ids.size()) + " tokens");
  }
}

}  // namespace

std::vector<double> value_vector(std::uint64_t token_id, std::uint64_t seed) { return embedding(token_id, seed, 2); }

namespace {

struct Embeddings {
  std::vector<std::vector<double>> q, k, v;
};

Embeddings embed_all(const std::vector<std::uint64_t>& ids, std::size_t n, std::uint64_t seed) {
  Embeddings e;
  e.q.resize(n);
  e.k.resize(n);
  e.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t id = id_at(ids, i);
    e.q[i] = embedding(id, seed, 0);
    e.k[i] = embedding(id, seed, 1);
    e.v[i] = embedding(id, seed, 2);
  }
  return e;
}

// Softmax over the keys the query may see, in ascending key order. Masked
// keys never enter the computation, so their content cannot leak.
std::vector<double> row_weights(const Embeddings& e, const MaskMatrix& m, std::size_t query) {
  const std::size_t n = m.size();
  std::vector<double> w(n, 0.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kSimDimension));
  double max_score = -INFINITY;
  for (std::size_t k = 0; k < n; ++k) {
    if (!m.at(query, k)) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < kSimDimension; ++j) s += e.q[query][j] * e.k[k][j];
    w[k] = s * scale;
    max_score = std::max(max_score, w[k]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!m.at(query, k)) continue;
    w[k] = std::exp(w[k] - max_score);
    total += w[k];
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (m.at(query, k)) w[k] /= total;
  }
  return w;
}

}  // namespace

std::vector<double> attention_weights(const std::vector<std::uint64_t>& token_ids, const MaskMatrix& matrix,
                                      std::size_t query, std::uint64_t seed) {
  check_dims(token_ids, matrix);
  return row_weights(embed_all(token_ids, matrix.size(), seed), matrix, query);
}

std::vector<std::vector<double>> simulate_attention(const std::vector<std::uint64_t>& token_ids,
                                                    const MaskMatrix& matrix, std::uint64_t seed) {
  check_dims(token_ids, matrix);
  const Embeddings e = embed_all(token_ids, matrix.size(), seed);
  std::vector<std::vector<double>> out(matrix.size(), std::vector<double>(kSimDimension, 0.0));
  for (std::size_t q = 0; q < matrix.size(); ++q) {
    const auto w = row_weights(e, matrix, q);
    for (std::size_t k = 0; k < matrix.size(); ++k) {
      if (!matrix.at(q, k)) continue;
      for (std::size_t j = 0; j < kSimDimension; ++j) out[q][j] += w[k] * e.v[k][j];
    }
  }
  return out;
}

std::vector<std::vector<double>> simulate_attention(const TokenSequence& tokens, const MaskMatrix& matrix,
                                                    std::uint64_t seed) {
  std::vector<std::uint64_t> ids;
  ids.reserve(tokens.tokens.size());
  for (const Token& t : tokens.tokens) ids.push_back(t.id);
  return simulate_attention(ids, matrix, seed);
}

}  // namespace llmon
