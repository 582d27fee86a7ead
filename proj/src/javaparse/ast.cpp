#include <algorithm>
#include <array>
#include <stdexcept>

#include "api2com/javaparse/ast.hpp"

namespace api2com::javaparse {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 13> kKindNames = {{
    {NodeKind::Method, "method"},
    {NodeKind::Param, "param"},
    {NodeKind::Block, "block"},
    {NodeKind::If, "if"},
    {NodeKind::For, "for"},
    {NodeKind::While, "while"},
    {NodeKind::Return, "return"},
    {NodeKind::Assign, "assign"},
    {NodeKind::Call, "call"},
    {NodeKind::Name, "name"},
    {NodeKind::Literal, "literal"},
    {NodeKind::BinOp, "binop"},
    {NodeKind::Other, "other"},
}};

constexpr std::string_view kOpen = "(";
constexpr std::string_view kClose = ")";

void collect_calls(const AstNode& n, std::vector<ApiCall>& out) {
  if (n.kind == NodeKind::Call && !n.children.empty() &&
      n.children.front().kind == NodeKind::Name) {
    const std::string& callee = n.children.front().label;
    const auto dot = callee.rfind('.');
    std::string simple = dot == std::string::npos ? callee : callee.substr(dot + 1);
    std::size_t args = n.children.size() - 1;
    if (n.children.size() > 1 && n.children[1].kind == NodeKind::Other &&
        n.children[1].label == kReceiverLabel) {
      --args;
    }
    if (!simple.empty()) out.push_back(ApiCall{std::move(simple), args, n.token_offset});
  }
  for (const auto& c : n.children) collect_calls(c, out);
}

class Flattener {
 public:
  explicit Flattener(std::size_t max_len) : max_len_(max_len) {}

  void node(const AstNode& n) {
    // "(" needs room for itself, the kind, and every close bracket after it.
    if (stopped_ || out_.size() + 2 + open_ + 1 > max_len_) {
      stopped_ = true;
      return;
    }
    out_.emplace_back(kOpen);
    out_.emplace_back(to_string(n.kind));
    ++open_;
    if (!n.label.empty()) {
      if (out_.size() + 1 + open_ > max_len_) {
        stopped_ = true;
      } else {
        out_.push_back(n.label);
      }
    }
    for (const auto& c : n.children) node(c);
    out_.emplace_back(kClose);
    --open_;
  }

  std::vector<std::string> take() { return std::move(out_); }

 private:
  std::size_t max_len_;
  std::size_t open_ = 0;
  bool stopped_ = false;
  std::vector<std::string> out_;
};

class Rebuilder {
 public:
  explicit Rebuilder(const std::vector<std::string>& flat) : flat_(flat) {}

  AstNode root() {
    AstNode n = node();
    if (pos_ != flat_.size()) throw std::invalid_argument("trailing tokens after AST root");
    return n;
  }

 private:
  const std::string& next() {
    if (pos_ >= flat_.size()) throw std::invalid_argument("truncated AST sequence");
    return flat_[pos_++];
  }

  AstNode node() {
    if (next() != kOpen) throw std::invalid_argument("expected '(' in AST sequence");
    const std::string& kind_text = next();
    auto kind = node_kind_from_string(kind_text);
    if (!kind) throw std::invalid_argument("unknown AST node kind '" + kind_text + "'");
    AstNode n(*kind);
    if (pos_ < flat_.size() && flat_[pos_] != kOpen && flat_[pos_] != kClose) n.label = next();
    while (pos_ < flat_.size() && flat_[pos_] == kOpen) n.children.push_back(node());
    if (next() != kClose) throw std::invalid_argument("expected ')' in AST sequence");
    return n;
  }

  const std::vector<std::string>& flat_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view to_string(NodeKind kind) {
  for (auto [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "other";
}

std::optional<NodeKind> node_kind_from_string(std::string_view text) {
  for (auto [k, name] : kKindNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::size_t AstNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::vector<ApiCall> extract_api_calls(const AstNode& ast) {
  std::vector<ApiCall> calls;
  collect_calls(ast, calls);
  std::stable_sort(calls.begin(), calls.end(),
                   [](const ApiCall& a, const ApiCall& b) { return a.position < b.position; });
  return calls;
}

std::vector<std::string> flatten_ast(const AstNode& ast, std::size_t max_len) {
  Flattener f(max_len);
  f.node(ast);
  return f.take();
}

AstNode rebuild_ast(const std::vector<std::string>& flat) { return Rebuilder(flat).root(); }

}  // namespace api2com::javaparse
