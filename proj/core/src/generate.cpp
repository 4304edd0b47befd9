#include "llmon/generate.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace llmon {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool chance(std::mt19937_64& rng, unsigned percent) { return pick(rng, 100) < percent; }

constexpr std::array<std::string_view, 12> kNames = {"email", "header", "from", "instr", "data", "exec",
                                                     "note",  "a",      "b_1",  "Para",  "x",    "input"};
constexpr std::array<std::string_view, 6> kInstances = {"a", "b", "1", "42", "x9", "Q"};

constexpr std::array<std::string_view, 8> kWords = {"alpha", "Tokyo", "New York", "hello world",
                                                    "42 apples", "mixed Case", "end.", "naïve café"};
constexpr std::array<std::string_view, 19> kAwkward = {
    "a, b",  "k: v", "3/4",  "back\\slash", " padded ", "",    "true", "null",    "12",    "-0.5e3",
    "x\ny",  "<|",   "|>",   "tab\tsep",    "a.b",      "instr:b", "//",   "\\\\", "false"};
constexpr std::array<std::string_view, 9> kKeys = {"Purpose", "Cities", "", " k ", "a:b", "x,y", "dup", "true", "GPA"};

std::string random_text(std::mt19937_64& rng, bool awkward) {
  const std::size_t parts = 1 + pick(rng, 3);
  std::string out;
  for (std::size_t i = 0; i < parts; ++i) {
    if (i) out += ' ';
    if (awkward && chance(rng, 40)) {
      out += kAwkward[pick(rng, kAwkward.size())];
    } else {
      out += kWords[pick(rng, kWords.size())];
    }
  }
  return out;
}

Node random_scalar(std::mt19937_64& rng, bool awkward) {
  switch (pick(rng, 9)) {
    case 0: {
      const long long v = static_cast<long long>(rng() % 2000001) - 1000000;
      return make_scalar(std::to_string(v), ScalarKind::Integer, true);
    }
    case 1: {
      static constexpr std::array<std::string_view, 6> floats = {"3.4", "-0.25", "1e10", "2.5E-3", "0.0", "6.02e+23"};
      return make_scalar(std::string(floats[pick(rng, floats.size())]), ScalarKind::Float, true);
    }
    case 2:
      return make_scalar(chance(rng, 50) ? "true" : "false", ScalarKind::Boolean, chance(rng, 50));
    case 3:
      return make_scalar("null", ScalarKind::Null, chance(rng, 50));
    default:
      return make_scalar(random_text(rng, awkward), ScalarKind::String, chance(rng, 20));
  }
}

class DocGen {
 public:
  DocGen(std::mt19937_64& rng, const GenOptions& opt) : rng_(rng), opt_(opt) {}

  Document run() {
    Document doc;
    const std::size_t roots = 1 + pick(rng_, 3);
    for (std::size_t i = 0; i < roots; ++i) doc.roots.push_back(node(0, std::nullopt));
    return doc;
  }

 private:
  Node node(std::size_t depth, const std::optional<std::string>& outer_name) {
    ++used_;
    if (depth >= opt_.max_depth || used_ >= opt_.max_nodes) return random_scalar(rng_, opt_.awkward_text);
    const std::size_t choice = pick(rng_, opt_.user_tags ? 10 : 7);
    if (choice < 3) return random_scalar(rng_, opt_.awkward_text);
    if (choice < 5) {
      Object o;
      const std::size_t n = pick(rng_, 4);
      for (std::size_t i = 0; i < n; ++i) {
        std::string key = opt_.awkward_text ? std::string(kKeys[pick(rng_, kKeys.size())])
                                            : std::string(kKeys[pick(rng_, 2)]);
        o.items.push_back(ObjectItem{std::move(key), node(depth + 1, outer_name)});
      }
      return Node{std::move(o)};
    }
    if (choice < 7) {
      List l;
      const std::size_t n = pick(rng_, 4);
      for (std::size_t i = 0; i < n; ++i) l.elements.push_back(node(depth + 1, outer_name));
      return Node{std::move(l)};
    }
    TagPath tag = random_tag_path(rng_, 3);
    if (outer_name && tag.size() > 1 && tag.front().name == *outer_name) {
      tag = TagPath(std::vector<TagSegment>{tag.back()});
    }
    const std::optional<std::string> next_outer = outer_name ? outer_name : std::optional(tag.front().name);
    if (chance(rng_, 15)) return make_tagged(std::move(tag), {}, true);
    std::vector<Node> children;
    const std::size_t n = pick(rng_, 4);
    for (std::size_t i = 0; i < n; ++i) children.push_back(node(depth + 1, next_outer));
    return make_tagged(std::move(tag), std::move(children), false);
  }

  std::mt19937_64& rng_;
  const GenOptions& opt_;
  std::size_t used_ = 0;
};

class JsonGen {
 public:
  JsonGen(std::mt19937_64& rng, std::size_t max_depth, std::size_t max_nodes)
      : rng_(rng), max_depth_(max_depth), max_nodes_(max_nodes) {}

  std::string run() {
    value(0);
    return std::move(out_);
  }

 private:
  void ws() {
    static constexpr std::array<std::string_view, 4> spaces = {"", "", " ", "\n  "};
    out_ += spaces[pick(rng_, spaces.size())];
  }

  void string() {
    static constexpr std::array<std::string_view, 14> pieces = {
        "Trips", "New York", "true", "null", "3.5", "-7", "quote\\\"d", "back\\\\slash", "line\\nbreak",
        "\\u00e9t\\u00e9", "a, b: c", "\\/path\\/", " edge ", ""};
    out_ += '"';
    const std::size_t n = 1 + pick(rng_, 2);
    for (std::size_t i = 0; i < n; ++i) out_ += pieces[pick(rng_, pieces.size())];
    out_ += '"';
  }

  void number() {
    char buf[64];
    switch (pick(rng_, 5)) {
      case 0:
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(rng_() >> 1) * (chance(rng_, 50) ? 1 : -1));
        break;
      case 1:
        std::snprintf(buf, sizeof buf, "%d", static_cast<int>(pick(rng_, 2001)) - 1000);
        break;
      case 2: {
        const double mant = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const int exp10 = static_cast<int>(pick(rng_, 41)) - 20;
        std::snprintf(buf, sizeof buf, "%.17g", (chance(rng_, 50) ? 1 : -1) * mant * std::pow(10.0, exp10));
        break;
      }
      case 3: {
        static constexpr std::array<std::string_view, 7> forms = {"3.4", "2.0", "1e5", "-0.0", "2.50", "1E-7", "0.1"};
        const auto f = forms[pick(rng_, forms.size())];
        std::snprintf(buf, sizeof buf, "%.*s", static_cast<int>(f.size()), f.data());
        break;
      }
      default:
        std::snprintf(buf, sizeof buf, "%.3f", static_cast<double>(pick(rng_, 100000)) / 7.0);
        break;
    }
    out_ += buf;
  }

  void value(std::size_t depth) {
    ++used_;
    const bool leaf = depth >= max_depth_ || used_ >= max_nodes_;
    const std::size_t choice = pick(rng_, leaf ? 6 : 9);
    ws();
    switch (choice) {
      case 0: case 1: string(); break;
      case 2: number(); break;
      case 3: out_ += chance(rng_, 50) ? "true" : "false"; break;
      case 4: out_ += "null"; break;
      case 5: number(); break;
      case 6: case 7: {
        out_ += '{';
        const std::size_t n = pick(rng_, 5);
        for (std::size_t i = 0; i < n && used_ < max_nodes_; ++i) {
          if (i) out_ += ',';
          ws();
          string();
          ws();
          out_ += ':';
          value(depth + 1);
        }
        ws();
        out_ += '}';
        break;
      }
      default: {
        out_ += '[';
        const std::size_t n = pick(rng_, 5);
        for (std::size_t i = 0; i < n && used_ < max_nodes_; ++i) {
          if (i) out_ += ',';
          value(depth + 1);
        }
        ws();
        out_ += ']';
        break;
      }
    }
    ws();
  }

  std::mt19937_64& rng_;
  std::size_t max_depth_;
  std::size_t max_nodes_;
  std::size_t used_ = 0;
  std::string out_;
};

}  // namespace

TagPath random_tag_path(std::mt19937_64& rng, std::size_t max_segments) {
  std::vector<TagSegment> segs(1 + pick(rng, max_segments));
  for (TagSegment& s : segs) {
    s.name = std::string(kNames[pick(rng, kNames.size())]);
    if (chance(rng, 30)) s.instance = std::string(kInstances[pick(rng, kInstances.size())]);
  }
  return TagPath(std::move(segs));
}

Document random_document(std::mt19937_64& rng, const GenOptions& options) { return DocGen(rng, options).run(); }

std::string random_json(std::mt19937_64& rng, std::size_t max_depth, std::size_t max_nodes) {
  return JsonGen(rng, max_depth, max_nodes).run();
}

}  // namespace llmon
