#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace api2com::javaparse {

enum class NodeKind {
  Method,
  Param,
  Block,
  If,
  For,
  While,
  Return,
  Assign,
  Call,
  Name,
  Literal,
  BinOp,
  Other,
};

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view text);

/// Parsed method structure.
///
/// Call nodes keep the callee Name in children[0]. The Name label is the
/// callee as written (possibly dotted, e.g. "a.b.c"). When the receiver is
/// not a plain dotted name, children[1] is an Other node labelled "receiver"
/// wrapping it; all remaining children are argument expressions.
///
/// token_offset is bookkeeping for ordering call sites and takes no part in
/// equality or flattening.
struct AstNode {
  NodeKind kind = NodeKind::Other;
  std::string label;
  std::vector<AstNode> children;
  std::size_t token_offset = 0;

  AstNode() = default;
  AstNode(NodeKind k, std::string l = {}, std::vector<AstNode> c = {})
      : kind(k), label(std::move(l)), children(std::move(c)) {}

  bool is_leaf() const { return children.empty(); }
  std::size_t size() const;  // node count

  friend bool operator==(const AstNode& a, const AstNode& b) {
    return a.kind == b.kind && a.label == b.label && a.children == b.children;
  }
};

inline constexpr std::string_view kReceiverLabel = "receiver";

struct ApiCall {
  std::string name;
  std::size_t arity = 0;
  std::size_t position = 0;  // significant-token offset of the callee name

  friend bool operator==(const ApiCall&, const ApiCall&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Recursive-descent parse of a single method declaration. Constructs the
/// parser does not model are kept as Other nodes over their token spans.
/// Throws ParseError on empty input or unbalanced brackets, LexError on
/// lexical errors.
AstNode parse_method(std::string_view source);

/// Call sites in first textual occurrence order. Qualified callees are reduced
/// to their simple name; duplicates are kept.
std::vector<ApiCall> extract_api_calls(const AstNode& ast);

/// Bracketed pre-order traversal: "(" kind [label] children... ")".
/// Empty labels are omitted. Output longer than max_len is cut and every
/// still-open bracket is closed, so the result never exceeds max_len.
std::vector<std::string> flatten_ast(const AstNode& ast, std::size_t max_len = 512);

/// Inverse of flatten_ast for untruncated sequences. Throws std::invalid_argument
/// on malformed input.
AstNode rebuild_ast(const std::vector<std::string>& flat);

/// Name and constructor-ness read off a method header.
struct MethodHeader {
  std::string name;
  bool is_constructor = false;
};

/// Reads the declaration header. Returns nullopt when no "name(" pair is found.
std::optional<MethodHeader> read_method_header(std::string_view source);

}  // namespace api2com::javaparse
