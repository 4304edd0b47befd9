#pragma once

// Document tree and tag-name model shared by both syntaxes, the converters
// and the analysis passes.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace llmon {

struct TagSegment {
  std::string name;
  std::optional<std::string> instance;

  friend bool operator==(const TagSegment&, const TagSegment&) = default;
};

/// A dotted, instance-qualified tag name such as `exec:x.instr`.
class TagPath {
 public:
  TagPath() = default;
  /// Throws Error(InvalidTagText) when a segment is malformed.
  explicit TagPath(std::vector<TagSegment> segments);

  /// Parses `name[:instance](.name[:instance])*`.
  /// Throws Error(InvalidTagText | EmptySegment).
  static TagPath parse(std::string_view text);
  /// Non-throwing variant used by the linter and by reference detection.
  static std::optional<TagPath> try_parse(std::string_view text);

  std::string to_string() const;

  const std::vector<TagSegment>& segments() const noexcept { return segments_; }
  std::size_t size() const noexcept { return segments_.size(); }
  bool empty() const noexcept { return segments_.empty(); }
  const TagSegment& front() const { return segments_.front(); }
  const TagSegment& back() const { return segments_.back(); }

  /// True when `prefix` equals the leading segments of this path.
  bool starts_with(const TagPath& prefix) const noexcept;
  TagPath concat(const TagPath& suffix) const;
  /// The path without its final segment (empty for single-segment paths).
  TagPath parent() const;

  friend bool operator==(const TagPath&, const TagPath&) = default;

 private:
  std::vector<TagSegment> segments_;
};

/// True when `text` matches `[_a-zA-Z][_a-zA-Z0-9]*`.
bool is_identifier(std::string_view text) noexcept;
/// True for the characters allowed inside tag text: `[_a-zA-Z0-9.:]`.
bool is_tag_char(char c) noexcept;
bool is_tag_start_char(char c) noexcept;

enum class ScalarKind { String, Integer, Float, Boolean, Null };

std::string_view to_string(ScalarKind kind) noexcept;

struct Scalar {
  std::string raw;
  ScalarKind kind = ScalarKind::String;
  /// Whether the scalar was written with a cast tag (`\float\3.4/float/`).
  /// Presentation only; structural equality ignores it.
  bool cast_explicit = false;
};

struct Node;
struct ObjectItem;

struct UserTagged {
  TagPath tag;
  std::vector<Node> children;
  bool self_closed = false;
};

struct Object {
  std::vector<ObjectItem> items;
};

struct List {
  std::vector<Node> elements;
};

struct Node {
  std::variant<UserTagged, Object, List, Scalar> value;

  bool is_tagged() const noexcept { return std::holds_alternative<UserTagged>(value); }
  bool is_object() const noexcept { return std::holds_alternative<Object>(value); }
  bool is_list() const noexcept { return std::holds_alternative<List>(value); }
  bool is_scalar() const noexcept { return std::holds_alternative<Scalar>(value); }
  const UserTagged& tagged() const { return std::get<UserTagged>(value); }
  const Object& object() const { return std::get<Object>(value); }
  const List& list() const { return std::get<List>(value); }
  const Scalar& scalar() const { return std::get<Scalar>(value); }
  UserTagged& tagged() { return std::get<UserTagged>(value); }
  Object& object() { return std::get<Object>(value); }
  List& list() { return std::get<List>(value); }
  Scalar& scalar() { return std::get<Scalar>(value); }
};

struct ObjectItem {
  std::string key;
  Node value;
};

Node make_tagged(TagPath tag, std::vector<Node> children = {}, bool self_closed = false);
Node make_scalar(std::string raw, ScalarKind kind = ScalarKind::String, bool cast_explicit = false);
Node make_object(std::vector<ObjectItem> items);
Node make_list(std::vector<Node> elements);

/// Preorder index of a node within its Document.
struct NodeId {
  std::uint32_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct ByteRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

struct Document {
  std::vector<Node> roots;
  /// Indexed by NodeId; filled by the parsers when source text is known.
  std::vector<std::optional<ByteRange>> source_spans;
};

/// Whitespace-insensitive structural equality: compares tags, self-closing,
/// object keys (in order), list elements and scalar (kind, raw). Ignores
/// cast_explicit and source spans.
bool structurally_equal(const Node& a, const Node& b);
bool structurally_equal(const Document& a, const Document& b);

/// Tag names that steer analysis. Defaults follow the names used in the
/// LLMON examples; callers may substitute their own vocabulary.
struct Vocabulary {
  std::vector<std::string> instruction_tags{"instr", "instruction"};
  std::vector<std::string> data_tags{"data"};
  std::string exec_tag = "exec";
  std::string exec_instr_child = "instr";
  std::string exec_input_child = "input";

  bool is_instruction(std::string_view name) const;
  bool is_data(std::string_view name) const;
};

const Vocabulary& default_vocabulary();

// Reserved structural and cast tag names.
inline constexpr std::string_view kObjectTag = "object";
inline constexpr std::string_view kItemTag = "item";
inline constexpr std::string_view kFlatItemTag = "object.item";
inline constexpr std::string_view kListTag = "list";
inline constexpr std::string_view kFlatListTag = "object.list";

bool is_object_tag_text(std::string_view text) noexcept;
bool is_item_tag_text(std::string_view text) noexcept;
bool is_list_tag_text(std::string_view text) noexcept;
bool is_structural_tag_text(std::string_view text) noexcept;
/// `int`, `float`, `bool`, `string` or `null`.
std::optional<ScalarKind> cast_kind_for_tag(std::string_view text) noexcept;
std::string_view cast_tag_for_kind(ScalarKind kind) noexcept;
bool is_reserved_tag_text(std::string_view text) noexcept;

// Literal grammar shared by both syntaxes and the JSON mapping.
bool is_integer_literal(std::string_view text) noexcept;
/// JSON number grammar (integers included).
bool is_number_literal(std::string_view text) noexcept;
bool is_bool_literal(std::string_view text) noexcept;
bool is_null_literal(std::string_view text) noexcept;
/// True when `raw` is a valid literal of `kind`.
bool literal_matches_kind(std::string_view raw, ScalarKind kind) noexcept;

bool is_space(char c) noexcept;
std::string_view trim(std::string_view text) noexcept;

/// Resolves a nested tag against the flattened path of its nearest tagged
/// ancestor. Returns nullopt when the child already carries a prefix that
/// disagrees with its ancestry (e.g. `exec:y.instr` nested in `exec:x`).
std::optional<TagPath> join_nested_path(const TagPath& ancestor, const TagPath& own);

enum class StructuralKind { Object, List, Scalar };

struct SpanEntry {
  NodeId id;
  std::variant<TagPath, StructuralKind> label;
  int depth = 0;
};

/// Deterministic preorder walk over every node.
std::vector<SpanEntry> iter_spans(const Document& doc);

/// Flat preorder view of a Document with parent links and flattened tag
/// paths. Keeps pointers into `doc`, which must outlive the index.
class DocumentIndex {
 public:
  struct Entry {
    const Node* node = nullptr;
    std::optional<NodeId> parent;
    /// Closest UserTagged ancestor (skipping Object/List containers).
    std::optional<NodeId> tagged_parent;
    int depth = 0;
    /// Flattened path for UserTagged nodes; nullopt for other nodes or when
    /// the nesting conflicts (see join_nested_path).
    std::optional<TagPath> effective_path;
    bool flatten_conflict = false;
  };

  explicit DocumentIndex(const Document& doc);

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& operator[](NodeId id) const { return entries_.at(id.value); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const std::vector<NodeId>& children(NodeId id) const { return children_.at(id.value); }

 private:
  std::vector<Entry> entries_;
  std::vector<std::vector<NodeId>> children_;
};

}  // namespace llmon
