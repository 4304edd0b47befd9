#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "golden.hpp"
#include "oracles.hpp"
#include "llmon/convert.hpp"
#include "llmon/error.hpp"
#include "llmon/mask.hpp"

namespace llmon {
namespace {

std::pair<std::size_t, std::size_t> scan_span(const std::vector<Token>& toks, const std::string& tag) {
  std::vector<std::string> texts;
  for (const Token& t : toks) texts.push_back(t.text);
  const auto r = testing::scan_span(texts, tag);
  if (!r) ADD_FAILURE() << "span " << tag << " not found";
  return r.value_or(std::pair<std::size_t, std::size_t>{0, 0});
}

std::set<std::size_t> positions(const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
  std::set<std::size_t> out;
  for (auto [a, b] : ranges) {
    for (std::size_t i = a; i <= b; ++i) out.insert(i);
  }
  return out;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

struct Fixture {
  ParsedMachine parsed;
  ExecBinding binding;
};

Fixture load(const std::string& machine_text, std::size_t which = 0) {
  Fixture f{parse_machine(machine_text), {}};
  const auto r = resolve_exec(f.parsed.document, build_catalog(f.parsed.document).catalog);
  EXPECT_GT(r.bindings.size(), which);
  f.binding = r.bindings.at(which);
  return f;
}

TEST(ComputeMask, ExecNoargsMasksUnselectedInstructions) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  const auto& toks = f.parsed.tokens.tokens;
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  EXPECT_EQ(m.sequence_length, toks.size());
  const auto expected = positions({scan_span(toks, "instr<|:|>a"), scan_span(toks, "instr<|:|>c")});
  EXPECT_EQ(as_set(m.masked_positions()), expected);
  for (std::size_t i : positions({scan_span(toks, "instr<|:|>b"), scan_span(toks, "exec<|:|>x")})) {
    EXPECT_TRUE(m.visible[i]) << i;
  }
}

TEST(ComputeMask, SingleInstructionLeavesEverythingVisible) {
  const Fixture f = load(convert("\\instr:a\\Only task/instr:a/ \\exec:x\\\\exec:x.instr\\instr:a/exec:x.instr//exec:x/",
                                 Format::Llmon, Format::Mrllmon));
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  EXPECT_EQ(m.masked_count(), 0u);
  EXPECT_EQ(m.to_json(), "{\"len\":" + std::to_string(m.sequence_length) + ",\"masked\":[],\"scope\":\"transitive\"}");
}

TEST(ComputeMask, PromptInjectionCountsMatchDistractorSpans) {
  const Fixture f = load(testing::golden_machine("prompt_injection"));
  const auto& toks = f.parsed.tokens.tokens;
  const auto m_span = scan_span(toks, "instr<|:|>m");
  const auto n_span = scan_span(toks, "instr<|:|>n");
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  EXPECT_EQ(m.masked_count(), (m_span.second - m_span.first + 1) + (n_span.second - n_span.first + 1));
  for (std::size_t i : positions({scan_span(toks, "data<|:|>2"), scan_span(toks, "instr<|:|>p")})) {
    EXPECT_TRUE(m.visible[i]);
  }
}

TEST(ComputeMask, RejectionHidesBoundData) {
  const Fixture f = load(testing::golden_machine("prompt_injection"));
  const auto& toks = f.parsed.tokens.tokens;
  MaskPolicy p;
  p.mode = MaskMode::Combined;
  p.rejected_spans = {"data:2"};
  const AttentionMask m = compute_mask(f.parsed, f.binding, p);
  const auto expected = positions({scan_span(toks, "instr<|:|>m"), scan_span(toks, "instr<|:|>n"),
                                   scan_span(toks, "data<|:|>2")});
  EXPECT_EQ(as_set(m.masked_positions()), expected);
  for (std::size_t i : positions({scan_span(toks, "exec<|:|>z")})) EXPECT_TRUE(m.visible[i]);
}

TEST(ComputeMask, RejectionOnlyKeepsOtherInstructions) {
  const Fixture f = load(testing::golden_machine("prompt_injection"));
  const auto& toks = f.parsed.tokens.tokens;
  MaskPolicy p;
  p.mode = MaskMode::PromptRejection;
  p.rejected_spans = {"instr:n"};
  const AttentionMask m = compute_mask(f.parsed, f.binding, p);
  EXPECT_EQ(as_set(m.masked_positions()), positions({scan_span(toks, "instr<|:|>n")}));
}

TEST(ComputeMask, UnboundDataFlag) {
  const std::string text = convert(
      "\\instr:a\\Sum/instr:a/ \\data:1\\1 2/data:1/ \\data:2\\3 4/data:2/ "
      "\\exec:x\\\\exec:x.instr\\instr:a/exec:x.instr/\\exec:x.input\\data:1/exec:x.input//exec:x/",
      Format::Llmon, Format::Mrllmon);
  const Fixture f = load(text);
  const auto& toks = f.parsed.tokens.tokens;
  EXPECT_EQ(compute_mask(f.parsed, f.binding, MaskPolicy{}).masked_count(), 0u);
  MaskPolicy p;
  p.mask_unbound_data = true;
  EXPECT_EQ(as_set(compute_mask(f.parsed, f.binding, p).masked_positions()),
            positions({scan_span(toks, "data<|:|>2")}));
}

TEST(ComputeMask, UntaggedFlag) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  const auto& toks = f.parsed.tokens.tokens;
  MaskPolicy p;
  p.mask_untagged = true;
  const AttentionMask m = compute_mask(f.parsed, f.binding, p);
  std::set<std::size_t> expected = positions({scan_span(toks, "instr<|:|>a"), scan_span(toks, "instr<|:|>c")});
  const auto inside = positions({scan_span(toks, "instr<|:|>a"), scan_span(toks, "instr<|:|>b"),
                                 scan_span(toks, "instr<|:|>c"), scan_span(toks, "exec<|:|>x")});
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!inside.count(i)) expected.insert(i);
  }
  EXPECT_EQ(as_set(m.masked_positions()), expected);
}

TEST(ComputeMask, Deterministic) {
  const Fixture f = load(testing::golden_machine("exec_1arg"));
  EXPECT_EQ(compute_mask(f.parsed, f.binding, MaskPolicy{}).to_json(),
            compute_mask(f.parsed, f.binding, MaskPolicy{}).to_json());
}

TEST(ComputeMask, Errors) {
  Fixture f = load(testing::golden_machine("exec_noargs"));
  MaskPolicy reject_none;
  reject_none.mode = MaskMode::PromptRejection;
  try {
    compute_mask(f.parsed, f.binding, reject_none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidPolicy);
  }
  MaskPolicy unknown;
  unknown.mode = MaskMode::Combined;
  unknown.rejected_spans = {"data:404"};
  try {
    compute_mask(f.parsed, f.binding, unknown);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownReference);
  }
  f.binding.resolved_instr = NodeId{9999};
  try {
    compute_mask(f.parsed, f.binding, MaskPolicy{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpanNotInIndex);
  }
}

TEST(MaskPolicy, FromJson) {
  const MaskPolicy d = MaskPolicy::from_json("");
  EXPECT_EQ(d.mode, MaskMode::InstructionSelection);
  EXPECT_EQ(d.scope, MaskScope::Transitive);
  EXPECT_TRUE(d.mask_unselected_instr);
  const MaskPolicy p = MaskPolicy::from_json(
      R"({"mode":"combined","scope":"generation_only","reject":["data:2"],"mask_unbound_data":true,
          "mask_untagged":true,"mask_unselected_instr":false})");
  EXPECT_EQ(p.mode, MaskMode::Combined);
  EXPECT_EQ(p.scope, MaskScope::GenerationOnly);
  EXPECT_EQ(p.rejected_spans, (std::vector<std::string>{"data:2"}));
  EXPECT_TRUE(p.mask_unbound_data);
  EXPECT_TRUE(p.mask_untagged);
  EXPECT_FALSE(p.mask_unselected_instr);
  for (const char* bad : {"[1]", "{\"mode\":\"all\"}", "{\"colour\":1}", "{\"reject\":5}", "{"}) {
    try {
      MaskPolicy::from_json(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidPolicy) << bad;
    }
  }
}

// Matrix built straight from the definition.
bool expected_entry(const AttentionMask& m, std::size_t q, std::size_t k) {
  if (k > q) return false;
  const std::size_t p = m.sequence_length;
  if (k >= p || m.visible[k]) return true;
  if (q >= p) return false;
  return m.scope == MaskScope::GenerationOnly;
}

void check_matrix(const AttentionMask& m, std::size_t gen) {
  const MaskMatrix mm = expand_matrix(m, gen);
  ASSERT_EQ(mm.size(), m.sequence_length + gen);
  EXPECT_EQ(mm.prompt_length(), m.sequence_length);
  for (std::size_t q = 0; q < mm.size(); ++q) {
    for (std::size_t k = 0; k < mm.size(); ++k) ASSERT_EQ(mm.at(q, k), expected_entry(m, q, k)) << q << "," << k;
  }
}

TEST(ExpandMatrix, EmptyMaskIsLowerTriangular) {
  AttentionMask m;
  m.sequence_length = 5;
  m.visible.assign(5, true);
  const MaskMatrix mm = expand_matrix(m, 0);
  for (std::size_t q = 0; q < 5; ++q) {
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(mm.at(q, k), k <= q);
  }
}

TEST(ExpandMatrix, MatchesDefinitionOnExecNoargs) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  check_matrix(m, 4);
  m.scope = MaskScope::GenerationOnly;
  check_matrix(m, 4);
  check_matrix(m, 0);
}

TEST(ExpandMatrix, TransitiveColumnOfMaskedKeyIsEmpty) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  const MaskMatrix mm = expand_matrix(m, 3);
  for (std::size_t k : m.masked_positions()) {
    for (std::size_t q = 0; q < mm.size(); ++q) EXPECT_FALSE(mm.at(q, k));
  }
}

TEST(ExpandMatrix, HexRows) {
  AttentionMask m;
  m.sequence_length = 3;
  m.visible = {true, false, true};
  const auto rows = expand_matrix(m, 1).hex_rows();
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "0000000000000001");
  EXPECT_EQ(rows[1], "0000000000000001");
  EXPECT_EQ(rows[2], "0000000000000005");
  EXPECT_EQ(rows[3], "000000000000000d");
  AttentionMask wide;
  wide.sequence_length = 70;
  wide.visible.assign(70, true);
  EXPECT_EQ(expand_matrix(wide, 0).hex_rows()[69], "000000000000003fffffffffffffffff");
}

TEST(Simulate, SingleTokenOutputIsItsValueVector) {
  AttentionMask m;
  m.sequence_length = 1;
  m.visible = {true};
  const auto out = simulate_attention(std::vector<std::uint64_t>{42}, expand_matrix(m, 0), 9);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], value_vector(42, 9));
}

TEST(Simulate, WeightsSumToOneOverVisibleKeys) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  const MaskMatrix mm = expand_matrix(m, 3);
  std::vector<std::uint64_t> ids;
  for (const Token& t : f.parsed.tokens.tokens) ids.push_back(t.id);
  for (std::size_t q = m.sequence_length; q < mm.size(); ++q) {
    const auto w = attention_weights(ids, mm, q, 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (!mm.at(q, k)) EXPECT_EQ(w[k], 0.0);
      sum += w[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Simulate, SubstitutingMaskedTokensChangesNothing) {
  const Fixture f = load(testing::golden_machine("prompt_injection"));
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  const MaskMatrix mm = expand_matrix(m, 6);
  std::vector<std::uint64_t> ids;
  for (const Token& t : f.parsed.tokens.tokens) ids.push_back(t.id);
  const auto base = simulate_attention(ids, mm, 77);
  auto swapped = ids;
  for (std::size_t k : m.masked_positions()) swapped[k] = ordinary_token_id("SYSTEM ACCESS GRANTED " + std::to_string(k));
  const auto after = simulate_attention(swapped, mm, 77);
  for (std::size_t q = m.sequence_length; q < mm.size(); ++q) EXPECT_EQ(base[q], after[q]) << q;
  // Without masking the same substitution is visible.
  AttentionMask open = m;
  open.visible.assign(open.visible.size(), true);
  const MaskMatrix plain = expand_matrix(open, 6);
  EXPECT_NE(simulate_attention(ids, plain, 77).back(), simulate_attention(swapped, plain, 77).back());
}

TEST(Simulate, TokenSequenceOverloadAndDimensionCheck) {
  const Fixture f = load(testing::golden_machine("exec_noargs"));
  const AttentionMask m = compute_mask(f.parsed, f.binding, MaskPolicy{});
  const MaskMatrix mm = expand_matrix(m, 2);
  std::vector<std::uint64_t> ids;
  for (const Token& t : f.parsed.tokens.tokens) ids.push_back(t.id);
  EXPECT_EQ(simulate_attention(f.parsed.tokens, mm, 3), simulate_attention(ids, mm, 3));
  ids.pop_back();
  try {
    simulate_attention(ids, mm, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Simulate, DeterministicForSeed) {
  AttentionMask m;
  m.sequence_length = 4;
  m.visible.assign(4, true);
  const MaskMatrix mm = expand_matrix(m, 2);
  const std::vector<std::uint64_t> ids = {1, 2, 3, 4};
  EXPECT_EQ(simulate_attention(ids, mm, 5), simulate_attention(ids, mm, 5));
  EXPECT_NE(simulate_attention(ids, mm, 5), simulate_attention(ids, mm, 6));
}

}  // namespace
}  // namespace llmon
