// llmon: command-line front end for parsing, converting, linting,
// tokenizing, masking and generating LLMON data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "llmon/analyze.hpp"
#include "llmon/api.hpp"
#include "llmon/convert.hpp"
#include "llmon/datagen.hpp"
#include "llmon/error.hpp"
#include "llmon/generate.hpp"
#include "llmon/machine.hpp"
#include "llmon/surface.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw llmon::Error(llmon::ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw llmon::Error(llmon::ErrorCode::IoError, "cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

llmon::Format format_for(const std::string& name, const std::string& path) {
  if (!name.empty()) {
    auto f = llmon::parse_format(name);
    if (!f) throw UsageError("unknown format '" + name + "' (expected llmon, mrllmon or json)");
    return *f;
  }
  auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends_with(".mrl") || ends_with(".mrllmon")) return llmon::Format::Mrllmon;
  if (ends_with(".json")) return llmon::Format::Json;
  return llmon::Format::Llmon;
}

void write_text(std::ostream& out, const std::string& text) {
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

llmon::FieldNames parse_fields(const std::string& pairs) {
  llmon::FieldNames f;
  if (pairs.empty()) return f;
  std::stringstream ss(pairs);
  std::string pair;
  while (std::getline(ss, pair, ',')) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw UsageError("--fields expects name=column pairs");
    const std::string name = pair.substr(0, eq);
    const std::string column = pair.substr(eq + 1);
    if (name == "instruction") {
      f.instruction = column;
    } else if (name == "input") {
      f.input = column;
    } else if (name == "output") {
      f.output = column;
    } else {
      throw UsageError("unknown field '" + name + "' in --fields");
    }
  }
  return f;
}

// Structural equality check for roundtrip-check; returns a failure
// description or an empty string.
std::string roundtrip_once(llmon::Format format, std::mt19937_64& rng, const llmon::SpecialTokenRegistry& reg) {
  using namespace llmon;
  if (format == Format::Json) {
    const std::string text = random_json(rng);
    const std::string back = llmon_to_json(json_to_llmon(text));
    if (!structurally_equal(json_to_llmon(text), json_to_llmon(back))) return "JSON '" + text + "' became '" + back + "'";
    return {};
  }
  const Document doc = random_document(rng);
  const std::string printed = format == Format::Llmon ? print_surface(doc) : print_machine(doc, reg);
  const Document again = format == Format::Llmon ? parse_surface(printed) : parse_machine(printed, reg).document;
  if (!structurally_equal(doc, again)) return "document changed after printing:\n" + printed;
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LLMON toolkit: parse, convert, lint, tokenize, mask and generate data"};
  app.require_subcommand(1);

  std::string registry_path;
  app.add_option("--registry", registry_path, "Special-token registry JSON");

  std::string input = "-";
  std::string output = "-";
  std::string from;
  std::string to;

  auto* parse = app.add_subcommand("parse", "Check syntax and print the tree as JSON");
  parse->add_option("file", input, "Input file or - for stdin");
  parse->add_option("--from", from, "Input format (llmon, mrllmon, json)");

  auto* conv = app.add_subcommand("convert", "Convert between llmon, mrllmon and json");
  conv->add_option("file", input, "Input file or - for stdin");
  conv->add_option("--from", from, "Input format");
  conv->add_option("--to", to, "Output format")->required();
  conv->add_option("-o,--output", output, "Output file or - for stdout");
  bool compact = false;
  conv->add_flag("--compact", compact, "Print without indentation");

  auto* lint = app.add_subcommand("lint", "Report structural and reference problems");
  lint->add_option("file", input, "Input file or - for stdin");
  lint->add_option("--from", from, "Input format");
  bool lint_text = false;
  lint->add_flag("--text", lint_text, "Human-readable report instead of JSON lines");

  auto* tok = app.add_subcommand("tokenize", "Print tokens: id, is_special, text");
  tok->add_option("file", input, "Machine-form input or - for stdin");
  bool tok_json = false;
  tok->add_flag("--json", tok_json, "Print one JSON array instead of lines");

  auto* mask = app.add_subcommand("mask", "Compute the attention mask for an exec span");
  std::string exec_ref;
  std::string reject;
  std::string scope = "transitive";
  std::string mode;
  bool mask_unbound = false;
  bool mask_untagged = false;
  bool keep_unselected = false;
  mask->add_option("file", input, "Input file or - for stdin");
  mask->add_option("--from", from, "Input format (llmon input is converted first)");
  mask->add_option("--exec", exec_ref, "Exec instance, e.g. exec:x")->required();
  mask->add_option("--reject", reject, "Comma-separated instances to reject");
  mask->add_option("--scope", scope, "transitive or generation_only");
  mask->add_option("--mode", mode, "instruction_selection, prompt_rejection or combined");
  mask->add_flag("--mask-unbound-data", mask_unbound, "Also mask data spans not bound by the exec");
  mask->add_flag("--mask-untagged", mask_untagged, "Also mask text outside every tagged span");
  mask->add_flag("--keep-unselected", keep_unselected, "Leave unselected instructions visible");

  std::string pool;
  std::string fields;
  auto* llmz = app.add_subcommand("llmonize", "Wrap instruction records in LLMON with an exec binding");
  llmz->add_option("--pool", pool, "JSONL records")->required();
  llmz->add_option("--fields", fields, "Field remap, e.g. instruction=prompt,input=context,output=response");
  llmz->add_option("-o,--output", output, "Output JSONL or - for stdout");

  std::size_t k = 2;
  std::size_t k_max = 0;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  auto* dis = app.add_subcommand("distract", "Generate distractor instances as JSONL");
  dis->add_option("--pool", pool, "JSONL records")->required();
  dis->add_option("--fields", fields, "Field remap");
  dis->add_option("-k", k, "Distractors per instance (lower bound with --k-max)");
  dis->add_option("--k-max", k_max, "Cycle k from -k up to this value");
  dis->add_option("--count", count, "Number of instances");
  dis->add_option("--seed", seed, "Random seed");
  dis->add_option("-o,--output", output, "Output JSONL or - for stdout");

  std::string rt_format = "json";
  auto* rt = app.add_subcommand("roundtrip-check", "Round-trip seeded random documents");
  rt->add_option("--format", rt_format, "json, llmon or mrllmon");
  rt->add_option("--count", count, "Number of documents");
  rt->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    llmon::SpecialTokenRegistry registry;
    if (!registry_path.empty()) {
      registry = llmon::SpecialTokenRegistry::from_json(read_input(registry_path));
      for (const auto& w : registry.warnings()) std::cerr << "llmon: warning: " << w << '\n';
    }

    if (*parse) {
      const std::string text = read_input(input);
      write_text(std::cout, llmon::api::parse_tree_json(text, format_for(from, input), registry));
      return 0;
    }

    if (*conv) {
      const auto target = llmon::parse_format(to);
      if (!target) throw UsageError("unknown format '" + to + "' (expected llmon, mrllmon or json)");
      llmon::ConvertOptions opts;
      opts.registry = &registry;
      if (compact) opts.print.style = llmon::PrintStyle::Compact;
      if (!compact) opts.json_indent = 2;
      const std::string result = llmon::convert(read_input(input), format_for(from, input), *target, opts);
      Output out(output);
      write_text(out.stream(), result);
      return 0;
    }

    if (*lint) {
      llmon::ConvertOptions opts;
      opts.registry = &registry;
      const auto doc = llmon::parse_any(read_input(input), format_for(from, input), opts);
      const auto report = llmon::lint(doc);
      std::cout << (lint_text ? llmon::to_text(report) : llmon::to_json_lines(report));
      return report.has_errors() ? 1 : 0;
    }

    if (*tok) {
      const std::string text = read_input(input);
      if (tok_json) {
        write_text(std::cout, llmon::api::tokenize_json(text, registry));
        return 0;
      }
      for (const auto& t : llmon::tokenize(text, registry)) {
        std::cout << t.id << '\t' << (t.is_special ? 1 : 0) << '\t'
                  << nlohmann::json(t.text).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
                  << '\n';
      }
      return 0;
    }

    if (*mask) {
      std::string text = read_input(input);
      const auto fmt = format_for(from, input);
      if (fmt == llmon::Format::Json) throw UsageError("mask needs llmon or mrllmon input");
      if (fmt == llmon::Format::Llmon) text = llmon::surface_to_machine(text, registry);
      nlohmann::ordered_json policy;
      std::vector<std::string> rejected;
      std::stringstream ss(reject);
      for (std::string r; std::getline(ss, r, ',');) {
        if (!r.empty()) rejected.push_back(r);
      }
      policy["mode"] = !mode.empty() ? mode : (rejected.empty() ? "instruction_selection" : "combined");
      policy["scope"] = scope;
      policy["reject"] = rejected;
      policy["mask_unselected_instr"] = !keep_unselected;
      policy["mask_unbound_data"] = mask_unbound;
      policy["mask_untagged"] = mask_untagged;
      write_text(std::cout, llmon::api::mask_json(text, exec_ref, policy.dump(), registry));
      return 0;
    }

    if (*llmz) {
      const auto records = llmon::read_pool_jsonl(std::filesystem::path(pool), parse_fields(fields));
      Output out(output);
      for (const auto& r : records) {
        const auto doc = llmon::llmonize(r);
        nlohmann::ordered_json j;
        j["mrllmon"] = llmon::print_machine(doc, registry);
        j["llmon"] = llmon::print_surface(doc);
        j["output"] = r.output;
        out.stream() << j.dump() << '\n';
      }
      return 0;
    }

    if (*dis) {
      const auto records = llmon::read_pool_jsonl(std::filesystem::path(pool), parse_fields(fields));
      const auto set = llmon::make_distractor_set(records, count, k, std::max(k, k_max), seed);
      Output out(output);
      for (const auto& inst : set) out.stream() << llmon::instance_to_json(inst, registry) << '\n';
      return 0;
    }

    if (*rt) {
      const auto fmt = llmon::parse_format(rt_format);
      if (!fmt) throw UsageError("unknown format '" + rt_format + "'");
      std::size_t failures = 0;
      for (std::size_t i = 0; i < count; ++i) {
        std::mt19937_64 rng(llmon::derive_seed(seed, i));
        const std::string why = roundtrip_once(*fmt, rng, registry);
        if (!why.empty()) {
          if (failures == 0) std::cerr << "llmon: case " << i << ": " << why << '\n';
          ++failures;
        }
      }
      std::cout << rt_format << ": " << (count - failures) << "/" << count << " round trips ok\n";
      return failures ? 1 : 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "llmon: " << e.what() << '\n';
    return 2;
  } catch (const llmon::Error& e) {
    std::cerr << "llmon: error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
