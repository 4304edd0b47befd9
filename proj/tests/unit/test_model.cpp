#include <random>
#include <regex>

#include <gtest/gtest.h>

#include "golden.hpp"
#include "llmon/error.hpp"
#include "llmon/generate.hpp"
#include "llmon/model.hpp"
#include "llmon/surface.hpp"
#include "oracles.hpp"

namespace llmon {
namespace {

using testing::canonical;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no llmon::Error thrown";
  return ErrorCode::IoError;
}

TEST(TagPath, ParsesExecSlot) {
  const TagPath p = TagPath::parse("exec:x.instr");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.segments()[0].name, "exec");
  EXPECT_EQ(p.segments()[0].instance, "x");
  EXPECT_EQ(p.segments()[1].name, "instr");
  EXPECT_FALSE(p.segments()[1].instance);
}

TEST(TagPath, ParsesSingleSegment) {
  const TagPath p = TagPath::parse("a");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.front().name, "a");
  EXPECT_FALSE(p.front().instance);
}

TEST(TagPath, ParsesAttachmentPath) {
  const TagPath p = TagPath::parse("email.attachments.attachment:1.filename");
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p.segments()[2].name, "attachment");
  EXPECT_EQ(p.segments()[2].instance, "1");
  EXPECT_FALSE(p.segments()[3].instance);
}

TEST(TagPath, NumericInstanceAccepted) { EXPECT_EQ(TagPath::parse("data:1").back().instance, "1"); }

TEST(TagPath, Serializes) {
  EXPECT_EQ(TagPath(std::vector<TagSegment>{{"instr", "b"}}).to_string(), "instr:b");
  EXPECT_EQ(TagPath(std::vector<TagSegment>{{"a", std::nullopt}}).to_string(), "a");
}

TEST(TagPath, RejectsMalformedText) {
  EXPECT_EQ(code_of([] { TagPath::parse("a..b"); }), ErrorCode::EmptySegment);
  EXPECT_EQ(code_of([] { TagPath::parse(".a"); }), ErrorCode::EmptySegment);
  EXPECT_EQ(code_of([] { TagPath::parse("a."); }), ErrorCode::EmptySegment);
  EXPECT_EQ(code_of([] { TagPath::parse("a:"); }), ErrorCode::EmptySegment);
  EXPECT_EQ(code_of([] { TagPath::parse("1a"); }), ErrorCode::InvalidTagText);
  EXPECT_EQ(code_of([] { TagPath::parse("a:b:c"); }), ErrorCode::InvalidTagText);
  EXPECT_EQ(code_of([] { TagPath::parse("a b"); }), ErrorCode::InvalidTagText);
  EXPECT_EQ(code_of([] { TagPath::parse("a-b"); }), ErrorCode::InvalidTagText);
  EXPECT_FALSE(TagPath::try_parse(""));
}

// Independent generator: segments drawn from a small alphabet that covers
// leading underscores, digits after the first character and numeric
// instances.
std::vector<TagSegment> random_segments(std::mt19937_64& rng) {
  static const char* first = "_abcXYZ";
  static const char* rest = "_az09Q";
  std::vector<TagSegment> segs(1 + rng() % 4);
  for (TagSegment& s : segs) {
    s.name = std::string(1, first[rng() % 7]);
    for (std::size_t i = rng() % 5; i > 0; --i) s.name += rest[rng() % 6];
    if (rng() % 3 == 0) {
      std::string inst;
      for (std::size_t i = 1 + rng() % 3; i > 0; --i) inst += rest[rng() % 6];
      s.instance = inst;
    }
  }
  return segs;
}

TEST(TagPath, RandomRoundTripMatchesGrammar) {
  std::mt19937_64 rng(7);
  const std::regex grammar("[_a-zA-Z][_a-zA-Z0-9.:]*");
  for (int i = 0; i < 2000; ++i) {
    const auto segs = random_segments(rng);
    const std::string text = testing::join_segments(segs);
    const TagPath p = TagPath::parse(text);
    EXPECT_EQ(p.segments(), segs) << text;
    EXPECT_EQ(p.to_string(), text);
    EXPECT_TRUE(std::regex_match(p.to_string(), grammar)) << text;
    EXPECT_EQ(TagPath::parse(p.to_string()), p);
  }
}

TEST(TagPath, PrefixOperations) {
  const TagPath p = TagPath::parse("exec:x.instr");
  EXPECT_TRUE(p.starts_with(TagPath::parse("exec:x")));
  EXPECT_FALSE(p.starts_with(TagPath::parse("exec:y")));
  EXPECT_EQ(p.parent().to_string(), "exec:x");
  EXPECT_EQ(TagPath::parse("a").concat(TagPath::parse("b:1")).to_string(), "a.b:1");
}

TEST(JoinNestedPath, PrefixesPlainChild) {
  EXPECT_EQ(join_nested_path(TagPath::parse("exec:x"), TagPath::parse("instr"))->to_string(), "exec:x.instr");
}

TEST(JoinNestedPath, AcceptsAlreadyFlatChild) {
  EXPECT_EQ(join_nested_path(TagPath::parse("exec:x"), TagPath::parse("exec:x.instr"))->to_string(),
            "exec:x.instr");
}

TEST(JoinNestedPath, RejectsDisagreeingPrefix) {
  EXPECT_FALSE(join_nested_path(TagPath::parse("exec:x"), TagPath::parse("exec:y.instr")));
}

TEST(Literals, FollowJsonNumberGrammar) {
  EXPECT_TRUE(is_integer_literal("12"));
  EXPECT_TRUE(is_integer_literal("-0"));
  EXPECT_FALSE(is_integer_literal("01"));
  EXPECT_FALSE(is_integer_literal("1.0"));
  EXPECT_TRUE(is_number_literal("3.4"));
  EXPECT_TRUE(is_number_literal("-2.5E-3"));
  EXPECT_TRUE(is_number_literal("1e5"));
  EXPECT_FALSE(is_number_literal("1."));
  EXPECT_FALSE(is_number_literal(".5"));
  EXPECT_FALSE(is_number_literal("+1"));
  EXPECT_TRUE(is_bool_literal("true"));
  EXPECT_FALSE(is_bool_literal("True"));
  EXPECT_TRUE(is_null_literal("null"));
  EXPECT_TRUE(literal_matches_kind("anything", ScalarKind::String));
  EXPECT_FALSE(literal_matches_kind("abc", ScalarKind::Float));
}

TEST(Reserved, CastTags) {
  EXPECT_EQ(cast_kind_for_tag("float"), ScalarKind::Float);
  EXPECT_EQ(cast_kind_for_tag("int"), ScalarKind::Integer);
  EXPECT_EQ(cast_kind_for_tag("bool"), ScalarKind::Boolean);
  EXPECT_EQ(cast_kind_for_tag("string"), ScalarKind::String);
  EXPECT_EQ(cast_kind_for_tag("null"), ScalarKind::Null);
  EXPECT_FALSE(cast_kind_for_tag("integer"));
  EXPECT_TRUE(is_structural_tag_text("object.item"));
  EXPECT_TRUE(is_structural_tag_text("item"));
  EXPECT_TRUE(is_structural_tag_text("object.list"));
  EXPECT_FALSE(is_structural_tag_text("email"));
}

TEST(IterSpans, IntroHasTwoTopLevelSpans) {
  const Document d = parse_surface(testing::golden_surface("intro_b"));
  std::vector<std::string> top;
  for (const SpanEntry& e : iter_spans(d)) {
    if (e.depth == 0) {
      ASSERT_TRUE(std::holds_alternative<TagPath>(e.label));
      top.push_back(std::get<TagPath>(e.label).to_string());
    }
  }
  EXPECT_EQ(top, (std::vector<std::string>{"instruction", "data"}));
}

TEST(IterSpans, SingleScalarIsOneStructuralEntry) {
  Document d;
  d.roots.push_back(make_scalar("hi"));
  const auto spans = iter_spans(d);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(std::get<StructuralKind>(spans[0].label), StructuralKind::Scalar);
}

TEST(IterSpans, EmailTaggedSpansInPreorder) {
  const Document d = parse_surface(testing::golden_surface("email"));
  std::vector<std::string> tags;
  for (const SpanEntry& e : iter_spans(d)) {
    if (std::holds_alternative<TagPath>(e.label)) tags.push_back(std::get<TagPath>(e.label).to_string());
  }
  // email, header, from, to, subject, smpt, body, paragraph, notes,
  // attachments, attachment:1, filename, type, attachment:2, filename, type.
  const std::vector<std::string> expected = {"email",      "header",       "from",     "to",
                                             "subject",    "smpt",         "body",     "paragraph",
                                             "notes",      "attachments",  "attachment:1", "filename",
                                             "type",       "attachment:2", "filename", "type"};
  EXPECT_EQ(tags, expected);
  EXPECT_EQ(testing::tree_stats(d).tagged, tags.size());
}

TEST(IterSpans, NodeIdsAreAPreorderBijection) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Document d = random_document(rng);
    const auto spans = iter_spans(d);
    ASSERT_EQ(spans.size(), testing::tree_stats(d).nodes);
    for (std::size_t k = 0; k < spans.size(); ++k) EXPECT_EQ(spans[k].id.value, k);
    EXPECT_EQ(DocumentIndex(d).size(), spans.size());
  }
}

TEST(StructuralEquality, AgreesWithCanonicalOracle) {
  std::mt19937_64 rng(5);
  Document prev;
  prev.roots.push_back(make_scalar("seed"));
  for (int i = 0; i < 300; ++i) {
    const Document d = random_document(rng);
    EXPECT_TRUE(structurally_equal(d, d));
    EXPECT_EQ(structurally_equal(d, prev), canonical(d) == canonical(prev));
    prev = d;
  }
}

TEST(StructuralEquality, IgnoresCastFlagButNotKind) {
  Document a, b, c;
  a.roots.push_back(make_scalar("3.4", ScalarKind::Float, true));
  b.roots.push_back(make_scalar("3.4", ScalarKind::Float, false));
  c.roots.push_back(make_scalar("3.4", ScalarKind::String, false));
  EXPECT_TRUE(structurally_equal(a, b));
  EXPECT_FALSE(structurally_equal(a, c));
}

TEST(DocumentIndex, FlattensThroughContainers) {
  const Document d = parse_surface("\\a\\ \\object\\ \\item\\k: \\b\\x/b/ /item/ /object/ /a/");
  const DocumentIndex idx(d);
  std::vector<std::string> paths;
  for (const auto& e : idx.entries()) {
    if (e.effective_path) paths.push_back(e.effective_path->to_string());
  }
  EXPECT_EQ(paths, (std::vector<std::string>{"a", "a.b"}));
}

TEST(Node, SelfClosedHasNoChildren) {
  const Document d = parse_surface("\\smpt/");
  ASSERT_TRUE(d.roots[0].is_tagged());
  EXPECT_TRUE(d.roots[0].tagged().self_closed);
  EXPECT_TRUE(d.roots[0].tagged().children.empty());
}

}  // namespace
}  // namespace llmon
