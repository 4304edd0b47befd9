#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "golden.hpp"
#include "llmon/api.hpp"
#include "llmon/error.hpp"
#include "llmon/mask.hpp"

namespace llmon {
namespace {

TEST(Api, ParseTreeJson) {
  const auto j = nlohmann::json::parse(api::parse_tree_json("\\x\\hi/x/", Format::Llmon));
  ASSERT_EQ(j["roots"].size(), 1u);
  const auto& root = j["roots"][0];
  EXPECT_EQ(root["id"], 0);
  EXPECT_EQ(root["type"], "tag");
  EXPECT_EQ(root["tag"], "x");
  EXPECT_EQ(root["self_closed"], false);
  EXPECT_EQ(root["span"], nlohmann::json::array({0, 8}));
  const auto& leaf = root["children"][0];
  EXPECT_EQ(leaf["id"], 1);
  EXPECT_EQ(leaf["type"], "scalar");
  EXPECT_EQ(leaf["kind"], "string");
  EXPECT_EQ(leaf["raw"], "hi");
  EXPECT_EQ(leaf["cast"], false);
}

TEST(Api, ParseTreeJsonStructures) {
  const auto j = nlohmann::json::parse(api::parse_tree_json(R"({"a":[1,null]})", Format::Json));
  const auto& obj = j["roots"][0];
  EXPECT_EQ(obj["type"], "object");
  EXPECT_EQ(obj["items"][0]["key"], "a");
  const auto& list = obj["items"][0]["value"];
  EXPECT_EQ(list["type"], "list");
  EXPECT_EQ(list["elements"][0]["kind"], "integer");
  EXPECT_EQ(list["elements"][1]["kind"], "null");
  EXPECT_EQ(list["elements"][1]["cast"], true);
}

TEST(Api, ConvertMatchesLibrary) {
  const std::string text = testing::golden_surface("intro_b");
  EXPECT_EQ(api::convert(text, Format::Llmon, Format::Mrllmon), convert(text, Format::Llmon, Format::Mrllmon));
  EXPECT_EQ(api::convert("hi", Format::Llmon, Format::Mrllmon), "hi");
}

TEST(Api, LintJson) {
  EXPECT_EQ(api::lint_json(testing::golden_surface("exec_1arg"), Format::Llmon), "");
  const std::string out = api::lint_json("\\instr:a\\a/instr:a/\\instr:a\\b/instr:a/", Format::Llmon);
  EXPECT_EQ(nlohmann::json::parse(out.substr(0, out.find('\n')))["code"], "DUP_INSTANCE");
}

TEST(Api, TokenizeJson) {
  const auto j = nlohmann::json::parse(api::tokenize_json("<|open|>a b"));
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["special"], true);
  EXPECT_EQ(j[0]["id"], 0);
  EXPECT_EQ(j[1]["text"], "a");
  EXPECT_EQ(j[1]["start"], 8);
  EXPECT_EQ(j[1]["end"], 9);
  EXPECT_EQ(j[2]["text"], " ");
}

TEST(Api, MaskJsonMatchesLibrary) {
  const std::string text = testing::golden_machine("exec_noargs");
  const auto parsed = parse_machine(text);
  const auto b = resolve_exec(parsed.document, build_catalog(parsed.document).catalog).bindings.at(0);
  EXPECT_EQ(api::mask_json(text, "exec:x", ""), compute_mask(parsed, b, MaskPolicy{}).to_json());
  const auto j = nlohmann::json::parse(api::mask_json(text, "exec:x", R"({"scope":"generation_only"})"));
  EXPECT_EQ(j["scope"], "generation_only");
  EXPECT_EQ(j["len"], parsed.tokens.tokens.size());
}

TEST(Api, MaskJsonSingleInstruction) {
  const std::string text =
      "<|open|>instr<|:|>a<|close|>go<|open_end|>instr<|:|>a<|close|>"
      "<|open|>exec<|:|>x<|close|><|open|>exec<|:|>x<|.|>instr<|close|>instr<|:|>a"
      "<|open_end|>exec<|:|>x<|.|>instr<|close|><|open_end|>exec<|:|>x<|close|>";
  EXPECT_EQ(nlohmann::json::parse(api::mask_json(text, "exec:x", ""))["masked"].size(), 0u);
}

TEST(Api, MaskJsonDanglingExec) {
  try {
    api::mask_json(testing::golden_machine("exec_noargs"), "exec:nope", "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownReference);
  }
  const std::string dangling =
      "<|open|>exec<|:|>x<|close|><|open|>exec<|:|>x<|.|>instr<|close|>instr<|:|>q"
      "<|open_end|>exec<|:|>x<|.|>instr<|close|><|open_end|>exec<|:|>x<|close|>";
  try {
    api::mask_json(dangling, "exec:x", "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownReference);
    EXPECT_NE(std::string(e.what()).find("DANGLING_REF"), std::string::npos);
  }
}

TEST(Api, ErrorsAreStructured) {
  try {
    api::convert("\\a\\ x /b/", Format::Llmon, Format::Json);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedCloseTag);
    ASSERT_TRUE(e.byte_offset());
    EXPECT_EQ(*e.byte_offset(), 6u);
  }
}

}  // namespace
}  // namespace llmon
