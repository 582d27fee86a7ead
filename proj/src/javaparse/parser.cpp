#include <algorithm>
#include <array>
#include <optional>

#include "api2com/javaparse/ast.hpp"
#include "api2com/javaparse/lexer.hpp"

namespace api2com::javaparse {

namespace {

using Tokens = std::vector<Token>;

// Thrown inside the parser when a construct is outside the modelled grammar.
// Caught at statement granularity and replaced by an Other node.
struct Unsupported {};

constexpr std::array<std::string_view, 12> kModifiers = {
    "public", "private",  "protected", "static",    "final",    "abstract",
    "native", "strictfp", "default",   "transient", "volatile", "synchronized",
};

bool is_modifier(const Token& t) {
  if (t.cls == TokenClass::Identifier) return t.text == "sealed";
  return t.cls == TokenClass::Keyword &&
         std::find(kModifiers.begin(), kModifiers.end(), t.text) != kModifiers.end();
}

bool is_literal_token(const Token& t) {
  return t.cls == TokenClass::Number || t.cls == TokenClass::String ||
         t.cls == TokenClass::Char || t.is_kw("true") || t.is_kw("false") || t.is_kw("null");
}

bool is_assign_op(const Token& t) {
  static constexpr std::array<std::string_view, 12> ops = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};
  return t.cls == TokenClass::Operator && std::find(ops.begin(), ops.end(), t.text) != ops.end();
}

int binary_precedence(const Token& t) {
  if (t.is_kw("instanceof")) return 7;
  if (t.cls != TokenClass::Operator) return -1;
  const auto& s = t.text;
  if (s == "||") return 1;
  if (s == "&&") return 2;
  if (s == "|") return 3;
  if (s == "^") return 4;
  if (s == "&") return 5;
  if (s == "==" || s == "!=") return 6;
  if (s == "<" || s == ">" || s == "<=" || s == ">=") return 7;
  if (s == "<<" || s == ">>" || s == ">>>") return 8;
  if (s == "+" || s == "-") return 9;
  if (s == "*" || s == "/" || s == "%") return 10;
  return -1;
}

void check_balanced(const Tokens& toks) {
  std::vector<const Token*> stack;
  for (const auto& t : toks) {
    if (t.cls != TokenClass::Separator) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") {
      stack.push_back(&t);
    } else if (t.text == ")" || t.text == "]" || t.text == "}") {
      const char open = t.text == ")" ? '(' : t.text == "]" ? '[' : '{';
      if (stack.empty() || stack.back()->text[0] != open) {
        throw ParseError("unbalanced '" + t.text + "'", t.offset);
      }
      stack.pop_back();
    }
  }
  if (!stack.empty()) {
    throw ParseError("unclosed '" + stack.back()->text + "'", stack.back()->offset);
  }
}

class Parser {
 public:
  explicit Parser(Tokens toks) : toks_(std::move(toks)) {}

  AstNode method() {
    AstNode m = method_declaration();
    if (!at_end()) throw ParseError("trailing tokens after method body", tok().offset);
    return m;
  }

  std::optional<MethodHeader> header() {
    try {
      skip_modifiers_and_annotations();
      if (is_op_at(pos_, "<")) skip_type_parameters();
      if (is_ident(pos_) && is_sep_at(pos_ + 1, "(")) return MethodHeader{toks_[pos_].text, true};
      auto end = type_end(pos_);
      if (end && is_ident(*end) && is_sep_at(*end + 1, "(")) {
        return MethodHeader{toks_[*end].text, false};
      }
    } catch (const Unsupported&) {
    }
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      if (is_ident(i) && is_sep_at(i + 1, "(")) return MethodHeader{toks_[i].text, false};
    }
    return std::nullopt;
  }

 private:
  // --- token helpers -------------------------------------------------------

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token& tok() const {
    if (at_end()) throw Unsupported{};
    return toks_[pos_];
  }
  bool is_sep_at(std::size_t i, std::string_view s) const {
    return i < toks_.size() && toks_[i].is_sep(s);
  }
  bool is_op_at(std::size_t i, std::string_view s) const {
    return i < toks_.size() && toks_[i].is_op(s);
  }
  bool is_kw_at(std::size_t i, std::string_view s) const {
    return i < toks_.size() && toks_[i].is_kw(s);
  }
  bool is_ident(std::size_t i) const {
    return i < toks_.size() && toks_[i].cls == TokenClass::Identifier;
  }
  bool accept_sep(std::string_view s) {
    if (is_sep_at(pos_, s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_sep(std::string_view s) {
    if (!accept_sep(s)) throw Unsupported{};
  }
  void expect_op(std::string_view s) {
    if (!is_op_at(pos_, s)) throw Unsupported{};
    ++pos_;
  }

  // Index one past the bracket group opened at i.
  std::size_t skip_group(std::size_t i) const {
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.cls != TokenClass::Separator) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0) return i + 1;
      }
    }
    throw Unsupported{};
  }

  // --- types ---------------------------------------------------------------

  // Closing-angle count carried by a token ('>' = 1, '>>' = 2, '>>>' = 3).
  static int closers(const Token& t) {
    if (t.cls != TokenClass::Operator) return 0;
    if (t.text == ">") return 1;
    if (t.text == ">>") return 2;
    if (t.text == ">>>") return 3;
    return 0;
  }

  // Index past a "<...>" type-argument list starting at i, or nullopt.
  std::optional<std::size_t> type_args_end(std::size_t i) const {
    if (!is_op_at(i, "<")) return std::nullopt;
    int depth = 0;
    for (; i < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.is_op("<")) {
        ++depth;
        continue;
      }
      if (int c = closers(t)) {
        depth -= c;
        if (depth == 0) return i + 1;
        if (depth < 0) return std::nullopt;
        continue;
      }
      const bool ok = t.cls == TokenClass::Identifier || t.is_sep(".") || t.is_sep(",") ||
                      t.is_op("?") || t.is_kw("extends") || t.is_kw("super") || t.is_op("&") ||
                      t.is_sep("[") || t.is_sep("]") || t.is_sep("@") ||
                      (t.cls == TokenClass::Keyword && is_primitive_type(t.text));
      if (!ok) return std::nullopt;
    }
    return std::nullopt;
  }

  // Index past a type starting at i, or nullopt when no type starts there.
  std::optional<std::size_t> type_end(std::size_t i) const {
    while (is_sep_at(i, "@") && is_ident(i + 1)) {
      i += 2;
      while (is_sep_at(i, ".") && is_ident(i + 1)) i += 2;
      if (is_sep_at(i, "(")) i = skip_group(i);
    }
    if (i >= toks_.size()) return std::nullopt;
    const auto& t = toks_[i];
    if (t.cls == TokenClass::Keyword && is_primitive_type(t.text)) {
      ++i;
    } else if (t.cls == TokenClass::Identifier) {
      ++i;
      for (;;) {
        if (auto e = type_args_end(i)) i = *e;
        if (is_sep_at(i, ".") && is_ident(i + 1)) {
          i += 2;
          continue;
        }
        break;
      }
    } else {
      return std::nullopt;
    }
    while (is_sep_at(i, "[") && is_sep_at(i + 1, "]")) i += 2;
    if (is_sep_at(i, "...")) ++i;
    return i;
  }

  std::string text_of(std::size_t begin, std::size_t end) const {
    std::string s;
    for (std::size_t i = begin; i < end; ++i) s += toks_[i].text;
    return s;
  }

  AstNode parse_type_name() {
    auto end = type_end(pos_);
    if (!end) throw Unsupported{};
    AstNode n(NodeKind::Name, text_of(pos_, *end));
    n.token_offset = pos_;
    pos_ = *end;
    return n;
  }

  void skip_type_parameters() {
    auto end = type_args_end(pos_);
    if (!end) throw Unsupported{};
    pos_ = *end;
  }

  void skip_annotation() {
    ++pos_;  // '@'
    if (!is_ident(pos_)) throw Unsupported{};
    ++pos_;
    while (is_sep_at(pos_, ".") && is_ident(pos_ + 1)) pos_ += 2;
    if (is_sep_at(pos_, "(")) pos_ = skip_group(pos_);
  }

  void skip_modifiers_and_annotations() {
    for (;;) {
      if (is_sep_at(pos_, "@") && !is_kw_at(pos_ + 1, "interface")) {
        skip_annotation();
      } else if (!at_end() && is_modifier(toks_[pos_])) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  // --- declarations --------------------------------------------------------

  AstNode method_declaration() {
    skip_modifiers_and_annotations();
    if (is_op_at(pos_, "<")) skip_type_parameters();
    skip_modifiers_and_annotations();

    AstNode method(NodeKind::Method);
    if (!(is_ident(pos_) && is_sep_at(pos_ + 1, "("))) {
      auto end = type_end(pos_);
      if (!end) throw ParseError("expected method declaration", offset_here());
      pos_ = *end;
    }
    if (!(is_ident(pos_) && is_sep_at(pos_ + 1, "("))) {
      throw ParseError("expected method name", offset_here());
    }
    AstNode name(NodeKind::Name, toks_[pos_].text);
    name.token_offset = pos_;
    method.children.push_back(std::move(name));
    ++pos_;

    try {
      expect_sep("(");
      while (!accept_sep(")")) {
        method.children.push_back(parameter());
        accept_sep(",");
      }
    } catch (const Unsupported&) {
      throw ParseError("malformed parameter list", offset_here());
    }
    while (is_sep_at(pos_, "[") && is_sep_at(pos_ + 1, "]")) pos_ += 2;
    if (is_kw_at(pos_, "throws")) {
      ++pos_;
      while (!at_end() && !is_sep_at(pos_, "{") && !is_sep_at(pos_, ";")) ++pos_;
    }
    if (is_kw_at(pos_, "default")) {  // annotation member default
      while (!at_end() && !is_sep_at(pos_, ";")) ++pos_;
    }
    if (accept_sep(";")) return method;
    if (!is_sep_at(pos_, "{")) throw ParseError("expected method body", offset_here());
    method.children.push_back(block());
    return method;
  }

  std::size_t offset_here() const {
    if (toks_.empty()) return 0;
    return at_end() ? toks_.back().offset : toks_[pos_].offset;
  }

  AstNode parameter() {
    skip_modifiers_and_annotations();
    AstNode type = parse_type_name();
    if (is_kw_at(pos_, "this")) {  // receiver parameter
      ++pos_;
      return AstNode(NodeKind::Param, {}, {std::move(type), AstNode(NodeKind::Name, "this")});
    }
    if (!is_ident(pos_)) throw Unsupported{};
    AstNode var(NodeKind::Name, toks_[pos_++].text);
    while (is_sep_at(pos_, "[") && is_sep_at(pos_ + 1, "]")) pos_ += 2;
    return AstNode(NodeKind::Param, {}, {std::move(type), std::move(var)});
  }

  // Local declaration "T a = x, b;" starting at pos_, if one starts there.
  bool looks_like_declaration() const {
    std::size_t i = pos_;
    while (is_kw_at(i, "final") || (is_sep_at(i, "@") && is_ident(i + 1))) {
      if (is_kw_at(i, "final")) {
        ++i;
      } else {
        i += 2;
        while (is_sep_at(i, ".") && is_ident(i + 1)) i += 2;
        if (is_sep_at(i, "(")) i = skip_group(i);
      }
    }
    auto end = type_end(i);
    if (!end || !is_ident(*end)) return false;
    const std::size_t after = *end + 1;
    return is_op_at(after, "=") || is_sep_at(after, ";") || is_sep_at(after, ",") ||
           is_sep_at(after, "[") || is_op_at(after, ":");
  }

  AstNode local_declaration(bool expect_semicolon) {
    while (is_kw_at(pos_, "final") || is_sep_at(pos_, "@")) {
      if (is_kw_at(pos_, "final")) {
        ++pos_;
      } else {
        skip_annotation();
      }
    }
    AstNode type = parse_type_name();
    std::vector<AstNode> declarators;
    do {
      if (!is_ident(pos_)) throw Unsupported{};
      AstNode var(NodeKind::Name, toks_[pos_++].text);
      while (is_sep_at(pos_, "[") && is_sep_at(pos_ + 1, "]")) pos_ += 2;
      if (is_op_at(pos_, "=")) {
        ++pos_;
        AstNode init = is_sep_at(pos_, "{") ? array_initializer() : expression();
        declarators.emplace_back(NodeKind::Assign, "=",
                                 std::vector<AstNode>{std::move(var), std::move(init)});
      } else {
        declarators.emplace_back(NodeKind::Other, "decl",
                                 std::vector<AstNode>{type, std::move(var)});
      }
    } while (accept_sep(","));
    if (expect_semicolon) expect_sep(";");
    if (declarators.size() == 1) return std::move(declarators.front());
    return AstNode(NodeKind::Other, "decl", std::move(declarators));
  }

  // --- statements ----------------------------------------------------------

  AstNode block() {
    expect_sep("{");
    AstNode b(NodeKind::Block);
    while (!is_sep_at(pos_, "}")) {
      if (at_end()) throw Unsupported{};
      b.children.push_back(statement());
    }
    ++pos_;
    return b;
  }

  AstNode statement() {
    const std::size_t start = pos_;
    try {
      return statement_strict();
    } catch (const Unsupported&) {
      pos_ = start;
      return fallback_statement();
    }
  }

  AstNode statement_strict() {
    const Token& t = tok();
    if (t.is_sep("{")) return block();
    if (t.is_sep(";")) {
      ++pos_;
      return AstNode(NodeKind::Other, "empty");
    }
    if (t.cls == TokenClass::Keyword) {
      if (t.text == "if") return if_statement();
      if (t.text == "while") {
        ++pos_;
        AstNode cond = paren_expression();
        AstNode body = statement();
        return AstNode(NodeKind::While, {}, {std::move(cond), std::move(body)});
      }
      if (t.text == "do") {
        ++pos_;
        AstNode body = statement();
        if (!is_kw_at(pos_, "while")) throw Unsupported{};
        ++pos_;
        AstNode cond = paren_expression();
        expect_sep(";");
        return AstNode(NodeKind::While, "do", {std::move(body), std::move(cond)});
      }
      if (t.text == "for") return for_statement();
      if (t.text == "return") {
        ++pos_;
        AstNode r(NodeKind::Return);
        if (!accept_sep(";")) {
          r.children.push_back(expression());
          expect_sep(";");
        }
        return r;
      }
      if (t.text == "throw") {
        ++pos_;
        AstNode e = expression();
        expect_sep(";");
        return AstNode(NodeKind::Other, "throw", {std::move(e)});
      }
      if (t.text == "break" || t.text == "continue") {
        AstNode n(NodeKind::Other, t.text);
        ++pos_;
        if (is_ident(pos_)) n.children.emplace_back(NodeKind::Name, toks_[pos_++].text);
        expect_sep(";");
        return n;
      }
      if (t.text == "try") return try_statement();
      if (t.text == "switch") {
        AstNode s = switch_construct();
        accept_sep(";");
        return s;
      }
      if (t.text == "synchronized") {
        ++pos_;
        AstNode lock = paren_expression();
        AstNode body = block();
        return AstNode(NodeKind::Other, "synchronized", {std::move(lock), std::move(body)});
      }
      if (t.text == "assert") {
        ++pos_;
        AstNode a(NodeKind::Other, "assert");
        a.children.push_back(expression());
        if (is_op_at(pos_, ":")) {
          ++pos_;
          a.children.push_back(expression());
        }
        expect_sep(";");
        return a;
      }
      if (t.text == "class" || t.text == "interface" || t.text == "enum" ||
          t.text == "abstract" || t.text == "static") {
        throw Unsupported{};
      }
    }
    if (t.cls == TokenClass::Identifier) {
      if (is_op_at(pos_ + 1, ":")) {  // labelled statement
        AstNode label(NodeKind::Name, t.text);
        pos_ += 2;
        AstNode body = statement();
        return AstNode(NodeKind::Other, "label", {std::move(label), std::move(body)});
      }
      if (t.text == "yield" && !is_op_at(pos_ + 1, "=") && !is_sep_at(pos_ + 1, "(") &&
          !is_sep_at(pos_ + 1, ".")) {
        ++pos_;
        AstNode e = expression();
        expect_sep(";");
        return AstNode(NodeKind::Other, "yield", {std::move(e)});
      }
      if ((t.text == "record") && is_ident(pos_ + 1)) throw Unsupported{};
    }
    if (looks_like_declaration()) return local_declaration(true);
    AstNode e = expression();
    expect_sep(";");
    return e;
  }

  AstNode paren_expression() {
    expect_sep("(");
    AstNode e = expression();
    expect_sep(")");
    return e;
  }

  AstNode if_statement() {
    ++pos_;
    AstNode n(NodeKind::If);
    n.children.push_back(paren_expression());
    n.children.push_back(statement());
    if (is_kw_at(pos_, "else")) {
      ++pos_;
      n.children.push_back(statement());
    }
    return n;
  }

  AstNode for_statement() {
    ++pos_;
    expect_sep("(");
    // Enhanced for: a ':' at depth zero inside the header.
    const std::size_t close = skip_group(pos_ - 1) - 1;
    bool each = false;
    for (std::size_t i = pos_, depth = 0; i < close; ++i) {
      const auto& t = toks_[i];
      if (t.is_sep("(") || t.is_sep("[") || t.is_sep("{")) ++depth;
      if (t.is_sep(")") || t.is_sep("]") || t.is_sep("}")) --depth;
      if (depth == 0 && t.is_op(":")) {
        each = true;
        break;
      }
    }
    AstNode f(NodeKind::For);
    if (each) {
      while (is_kw_at(pos_, "final") || is_sep_at(pos_, "@")) {
        if (is_kw_at(pos_, "final")) {
          ++pos_;
        } else {
          skip_annotation();
        }
      }
      AstNode type = parse_type_name();
      if (!is_ident(pos_)) throw Unsupported{};
      AstNode var(NodeKind::Name, toks_[pos_++].text);
      expect_op(":");
      f.label = "each";
      f.children.emplace_back(NodeKind::Param, "", std::vector<AstNode>{std::move(type), std::move(var)});
      f.children.push_back(expression());
      expect_sep(")");
    } else {
      AstNode init(NodeKind::Other, "init");
      if (!is_sep_at(pos_, ";")) {
        if (looks_like_declaration()) {
          init.children.push_back(local_declaration(false));
        } else {
          do init.children.push_back(expression());
          while (accept_sep(","));
        }
      }
      expect_sep(";");
      AstNode cond = is_sep_at(pos_, ";") ? AstNode(NodeKind::Other, "empty") : expression();
      expect_sep(";");
      AstNode update(NodeKind::Other, "update");
      if (!is_sep_at(pos_, ")")) {
        do update.children.push_back(expression());
        while (accept_sep(","));
      }
      expect_sep(")");
      f.children.push_back(std::move(init));
      f.children.push_back(std::move(cond));
      f.children.push_back(std::move(update));
    }
    f.children.push_back(statement());
    return f;
  }

  AstNode try_statement() {
    ++pos_;
    AstNode t(NodeKind::Other, "try");
    if (is_sep_at(pos_, "(")) {
      ++pos_;
      AstNode res(NodeKind::Other, "resources");
      while (!accept_sep(")")) {
        if (looks_like_declaration()) {
          res.children.push_back(local_declaration(false));
        } else {
          res.children.push_back(expression());
        }
        accept_sep(";");
      }
      t.children.push_back(std::move(res));
    }
    t.children.push_back(block());
    while (is_kw_at(pos_, "catch")) {
      ++pos_;
      expect_sep("(");
      while (is_kw_at(pos_, "final") || is_sep_at(pos_, "@")) {
        if (is_kw_at(pos_, "final")) {
          ++pos_;
        } else {
          skip_annotation();
        }
      }
      std::string types;
      const std::size_t type_start = pos_;
      AstNode type = parse_type_name();
      types = type.label;
      while (is_op_at(pos_, "|")) {
        ++pos_;
        types += "|" + parse_type_name().label;
      }
      if (!is_ident(pos_)) throw Unsupported{};
      AstNode var(NodeKind::Name, toks_[pos_++].text);
      expect_sep(")");
      AstNode param(NodeKind::Param, {}, {AstNode(NodeKind::Name, types), std::move(var)});
      param.children.front().token_offset = type_start;
      AstNode body = block();
      t.children.emplace_back(NodeKind::Other, "catch",
                              std::vector<AstNode>{std::move(param), std::move(body)});
    }
    if (is_kw_at(pos_, "finally")) {
      ++pos_;
      t.children.emplace_back(NodeKind::Other, "finally", std::vector<AstNode>{block()});
    }
    return t;
  }

  AstNode switch_construct() {
    ++pos_;  // 'switch'
    AstNode s(NodeKind::Other, "switch");
    s.children.push_back(paren_expression());
    expect_sep("{");
    while (!accept_sep("}")) {
      AstNode c(NodeKind::Other, "case");
      if (is_kw_at(pos_, "default")) {
        ++pos_;
        c.label = "default";
      } else if (is_kw_at(pos_, "case")) {
        ++pos_;
        do c.children.push_back(expression(/*allow_lambda=*/false));
        while (accept_sep(","));
      } else {
        throw Unsupported{};
      }
      if (is_op_at(pos_, "->")) {
        ++pos_;
        if (is_sep_at(pos_, "{")) {
          c.children.push_back(block());
        } else if (is_kw_at(pos_, "throw")) {
          c.children.push_back(statement());
        } else {
          c.children.push_back(expression());
          expect_sep(";");
        }
      } else {
        expect_op(":");
        while (!is_kw_at(pos_, "case") && !is_kw_at(pos_, "default") && !is_sep_at(pos_, "}")) {
          if (at_end()) throw Unsupported{};
          c.children.push_back(statement());
        }
      }
      s.children.push_back(std::move(c));
    }
    return s;
  }

  // End (exclusive) of an unparsed statement starting at pos_.
  std::size_t fallback_end() const {
    std::size_t i = pos_;
    while (i < toks_.size()) {
      const auto& t = toks_[i];
      if (t.is_sep(";")) return i + 1;
      if (t.is_sep("}")) return i;  // enclosing block ends
      if (t.is_sep("(") || t.is_sep("[")) {
        i = skip_group(i);
        continue;
      }
      if (t.is_sep("{")) {
        i = skip_group(i);
        if (i < toks_.size()) {
          const auto& n = toks_[i];
          if (n.is_sep(")") || n.is_sep(",") || n.is_sep(".") || n.is_sep(";") ||
              n.cls == TokenClass::Operator || n.is_kw("while") || n.is_kw("catch") ||
              n.is_kw("finally") || n.is_kw("else")) {
            continue;
          }
        }
        return i;
      }
      ++i;
    }
    return i;
  }

  AstNode fallback_statement() {
    std::size_t end = fallback_end();
    if (end == pos_) end = pos_ + 1;  // always make progress
    AstNode n(NodeKind::Other, "stmt", span_nodes(pos_, end));
    pos_ = end;
    return n;
  }

  // Generic leaves for an unparsed span; call sites inside it still become
  // Call nodes so that API extraction sees them.
  std::vector<AstNode> span_nodes(std::size_t begin, std::size_t end) const {
    std::vector<AstNode> out;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& t = toks_[i];
      if (t.cls == TokenClass::Identifier && is_sep_at(i + 1, "(") && i + 1 < end &&
          is_call_site(i)) {
        const std::size_t close = skip_group(i + 1) - 1;
        AstNode call(NodeKind::Call);
        call.token_offset = i;
        AstNode callee(NodeKind::Name, t.text);
        callee.token_offset = i;
        call.children.push_back(std::move(callee));
        for (auto [b, e] : split_arguments(i + 2, close)) {
          call.children.emplace_back(NodeKind::Other, "arg", span_nodes(b, e));
        }
        out.push_back(std::move(call));
        i = close;
        continue;
      }
      if (is_literal_token(t)) {
        out.emplace_back(NodeKind::Literal, t.text);
      } else if (t.cls == TokenClass::Identifier) {
        out.emplace_back(NodeKind::Name, t.text);
      } else if (t.cls == TokenClass::Keyword || t.cls == TokenClass::Operator) {
        out.emplace_back(NodeKind::Other, t.text);
      }
    }
    return out;
  }

  // Identifier at i followed by '(' is a call unless it names a declaration,
  // an annotation or a constructor.
  bool is_call_site(std::size_t i) const {
    if (i == 0) return true;
    const auto& prev = toks_[i - 1];
    if (prev.cls == TokenClass::Identifier || prev.is_sep("]") || prev.is_sep("@")) return false;
    if (prev.cls == TokenClass::Keyword && (is_primitive_type(prev.text) || prev.text == "new")) {
      return false;
    }
    // new a.b.C(...)
    std::size_t j = i;
    while (j >= 2 && toks_[j - 1].is_sep(".") && toks_[j - 2].cls == TokenClass::Identifier) j -= 2;
    if (j != i && j >= 1 && toks_[j - 1].is_kw("new")) return false;
    return true;
  }

  std::vector<std::pair<std::size_t, std::size_t>> split_arguments(std::size_t begin,
                                                                   std::size_t end) const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (begin >= end) return out;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end;) {
      const auto& t = toks_[i];
      if (t.is_sep("(") || t.is_sep("[") || t.is_sep("{")) {
        i = skip_group(i);
        continue;
      }
      if (t.is_sep(",")) {
        out.emplace_back(start, i);
        start = i + 1;
      }
      ++i;
    }
    out.emplace_back(start, end);
    return out;
  }

  // --- expressions ---------------------------------------------------------

  AstNode expression(bool allow_lambda = true) {
    if (allow_lambda) {
      if (auto l = try_lambda()) return std::move(*l);
    }
    AstNode lhs = ternary(allow_lambda);
    if (!at_end() && is_assign_op(toks_[pos_])) {
      std::string op = toks_[pos_++].text;
      AstNode rhs = is_sep_at(pos_, "{") ? array_initializer() : expression();
      return AstNode(NodeKind::Assign, std::move(op), {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  std::optional<AstNode> try_lambda() {
    std::vector<AstNode> params;
    if (is_ident(pos_) && is_op_at(pos_ + 1, "->")) {
      params.emplace_back(NodeKind::Name, toks_[pos_].text);
      pos_ += 2;
    } else if (is_sep_at(pos_, "(")) {
      const std::size_t close = skip_group(pos_) - 1;
      if (!is_op_at(close + 1, "->")) return std::nullopt;
      for (std::size_t i = pos_ + 1; i < close; ++i) {
        if (is_ident(i) && (is_sep_at(i + 1, ",") || i + 1 == close)) {
          params.emplace_back(NodeKind::Name, toks_[i].text);
        }
      }
      pos_ = close + 2;
    } else {
      return std::nullopt;
    }
    AstNode body = is_sep_at(pos_, "{") ? block() : expression();
    params.push_back(std::move(body));
    return AstNode(NodeKind::Other, "lambda", std::move(params));
  }

  AstNode ternary(bool allow_lambda) {
    AstNode cond = binary(1, allow_lambda);
    if (is_op_at(pos_, "?")) {
      ++pos_;
      AstNode a = expression();
      expect_op(":");
      AstNode b = expression(allow_lambda);
      return AstNode(NodeKind::Other, "?:", {std::move(cond), std::move(a), std::move(b)});
    }
    return cond;
  }

  AstNode binary(int min_prec, bool allow_lambda) {
    AstNode lhs = unary();
    for (;;) {
      if (at_end()) return lhs;
      const int prec = binary_precedence(toks_[pos_]);
      if (prec < min_prec) return lhs;
      std::string op = toks_[pos_++].text;
      AstNode rhs;
      if (op == "instanceof") {
        if (is_kw_at(pos_, "final")) ++pos_;
        rhs = parse_type_name();
        if (is_ident(pos_)) {  // pattern binding
          rhs = AstNode(NodeKind::Other, "pattern",
                        {std::move(rhs), AstNode(NodeKind::Name, toks_[pos_++].text)});
        }
      } else {
        rhs = binary(prec + 1, allow_lambda);
      }
      lhs = AstNode(NodeKind::BinOp, std::move(op), {std::move(lhs), std::move(rhs)});
    }
  }

  bool starts_operand(std::size_t i) const {
    if (i >= toks_.size()) return false;
    const auto& t = toks_[i];
    if (t.cls == TokenClass::Identifier || is_literal_token(t)) return true;
    if (t.is_sep("(")) return true;
    if (t.is_op("!") || t.is_op("~")) return true;
    return t.is_kw("this") || t.is_kw("super") || t.is_kw("new") || t.is_kw("switch");
  }

  std::optional<AstNode> try_cast() {
    if (!is_sep_at(pos_, "(")) return std::nullopt;
    auto end = type_end(pos_ + 1);
    if (!end) return std::nullopt;
    std::size_t close = *end;
    while (is_op_at(close, "&")) {  // intersection casts
      auto more = type_end(close + 1);
      if (!more) return std::nullopt;
      close = *more;
    }
    if (!is_sep_at(close, ")")) return std::nullopt;
    const bool primitive = toks_[pos_ + 1].cls == TokenClass::Keyword &&
                           is_primitive_type(toks_[pos_ + 1].text) && close == pos_ + 2;
    if (!primitive && !starts_operand(close + 1)) return std::nullopt;
    if (!primitive && is_op_at(close + 1, "->")) return std::nullopt;
    AstNode type(NodeKind::Name, text_of(pos_ + 1, close));
    pos_ = close + 1;
    AstNode operand = unary();
    return AstNode(NodeKind::Other, "cast", {std::move(type), std::move(operand)});
  }

  AstNode unary() {
    const Token& t = tok();
    if (t.cls == TokenClass::Operator &&
        (t.text == "+" || t.text == "-" || t.text == "!" || t.text == "~" || t.text == "++" ||
         t.text == "--")) {
      std::string op = t.text;
      ++pos_;
      AstNode operand = unary();
      return AstNode(NodeKind::Other, op, {std::move(operand)});
    }
    if (auto c = try_cast()) return std::move(*c);
    return postfix(primary());
  }

  // True when n is a dotted name such as "a.b.c" that a call can extend.
  static bool is_plain_name(const AstNode& n) { return n.kind == NodeKind::Name && n.is_leaf(); }

  AstNode make_call(AstNode callee_or_receiver, std::string name, std::size_t name_offset,
                    bool qualified) {
    AstNode call(NodeKind::Call);
    call.token_offset = name_offset;
    if (!qualified) {
      AstNode callee(NodeKind::Name, std::move(name));
      callee.token_offset = name_offset;
      call.children.push_back(std::move(callee));
    } else if (is_plain_name(callee_or_receiver)) {
      AstNode callee(NodeKind::Name, callee_or_receiver.label + "." + name);
      callee.token_offset = name_offset;
      call.children.push_back(std::move(callee));
    } else {
      AstNode callee(NodeKind::Name, std::move(name));
      callee.token_offset = name_offset;
      call.children.push_back(std::move(callee));
      call.children.emplace_back(NodeKind::Other, std::string(kReceiverLabel),
                                 std::vector<AstNode>{std::move(callee_or_receiver)});
    }
    for (auto& a : arguments()) call.children.push_back(std::move(a));
    return call;
  }

  std::vector<AstNode> arguments() {
    expect_sep("(");
    std::vector<AstNode> args;
    if (accept_sep(")")) return args;
    do args.push_back(expression());
    while (accept_sep(","));
    expect_sep(")");
    return args;
  }

  AstNode postfix(AstNode e) {
    for (;;) {
      if (at_end()) return e;
      const Token& t = toks_[pos_];
      if (t.is_sep(".")) {
        ++pos_;
        if (is_op_at(pos_, "<")) {  // explicit generic call
          skip_type_parameters();
          if (!is_ident(pos_) || !is_sep_at(pos_ + 1, "(")) throw Unsupported{};
        }
        const Token& m = tok();
        if (m.cls == TokenClass::Identifier) {
          const std::size_t at = pos_++;
          if (is_sep_at(pos_, "(")) {
            e = make_call(std::move(e), m.text, at, true);
          } else if (is_plain_name(e)) {
            e.label += "." + m.text;
          } else {
            e = AstNode(NodeKind::Other, ".", {std::move(e), AstNode(NodeKind::Name, m.text)});
          }
        } else if (m.is_kw("this") || m.is_kw("class") || m.is_kw("super")) {
          ++pos_;
          if (is_plain_name(e)) {
            e.label += "." + m.text;
          } else {
            e = AstNode(NodeKind::Other, ".", {std::move(e), AstNode(NodeKind::Name, m.text)});
          }
        } else {
          throw Unsupported{};
        }
      } else if (t.is_sep("[")) {
        ++pos_;
        AstNode idx = expression();
        expect_sep("]");
        e = AstNode(NodeKind::Other, "[]", {std::move(e), std::move(idx)});
      } else if (t.is_op("++") || t.is_op("--")) {
        ++pos_;
        e = AstNode(NodeKind::Other, "post" + t.text, {std::move(e)});
      } else if (t.is_sep("::")) {
        ++pos_;
        const Token& m = tok();
        if (m.cls != TokenClass::Identifier && !m.is_kw("new")) throw Unsupported{};
        ++pos_;
        e = AstNode(NodeKind::Other, "::", {std::move(e), AstNode(NodeKind::Name, m.text)});
      } else {
        return e;
      }
    }
  }

  AstNode primary() {
    const Token& t = tok();
    if (is_literal_token(t)) {
      ++pos_;
      return AstNode(NodeKind::Literal, t.text);
    }
    if (t.cls == TokenClass::Identifier) {
      const std::size_t at = pos_++;
      if (is_sep_at(pos_, "(")) return make_call(AstNode(), t.text, at, false);
      AstNode n(NodeKind::Name, t.text);
      n.token_offset = at;
      return n;
    }
    if (t.is_sep("(")) {
      ++pos_;
      AstNode inner = expression();
      expect_sep(")");
      return inner;
    }
    if (t.is_kw("this") || t.is_kw("super")) {
      ++pos_;
      if (is_sep_at(pos_, "(")) return AstNode(NodeKind::Other, t.text, arguments());
      return AstNode(NodeKind::Name, t.text);
    }
    if (t.is_kw("new")) return creator();
    if (t.is_kw("switch")) return switch_construct();
    if (t.cls == TokenClass::Keyword && is_primitive_type(t.text)) {
      // int.class, int[].class
      auto end = type_end(pos_);
      if (end && is_sep_at(*end, ".") && is_kw_at(*end + 1, "class")) {
        AstNode n(NodeKind::Name, text_of(pos_, *end) + ".class");
        pos_ = *end + 2;
        return n;
      }
      if (end && is_sep_at(*end, "::")) {
        AstNode n(NodeKind::Name, text_of(pos_, *end));
        pos_ = *end;
        return n;
      }
    }
    if (t.is_sep("{")) return array_initializer();
    throw Unsupported{};
  }

  AstNode array_initializer() {
    expect_sep("{");
    AstNode a(NodeKind::Other, "array");
    while (!accept_sep("}")) {
      a.children.push_back(is_sep_at(pos_, "{") ? array_initializer() : expression());
      if (!accept_sep(",") && !is_sep_at(pos_, "}")) throw Unsupported{};
    }
    return a;
  }

  AstNode creator() {
    ++pos_;  // 'new'
    while (is_sep_at(pos_, "@")) skip_annotation();
    if (is_op_at(pos_, "<")) skip_type_parameters();
    // Element type without array dims: parse name + type args manually.
    const std::size_t type_start = pos_;
    if (tok().cls == TokenClass::Keyword && is_primitive_type(tok().text)) {
      ++pos_;
    } else if (is_ident(pos_)) {
      ++pos_;
      for (;;) {
        if (is_op_at(pos_, "<") && is_op_at(pos_ + 1, ">")) {
          pos_ += 2;  // diamond
        } else if (auto e = type_args_end(pos_)) {
          pos_ = *e;
        }
        if (is_sep_at(pos_, ".") && is_ident(pos_ + 1)) {
          pos_ += 2;
          continue;
        }
        break;
      }
    } else {
      throw Unsupported{};
    }
    AstNode type(NodeKind::Name, text_of(type_start, pos_));
    if (is_sep_at(pos_, "[")) {
      AstNode arr(NodeKind::Other, "newarray", {std::move(type)});
      while (is_sep_at(pos_, "[")) {
        ++pos_;
        if (accept_sep("]")) continue;
        arr.children.push_back(expression());
        expect_sep("]");
      }
      if (is_sep_at(pos_, "{")) arr.children.push_back(array_initializer());
      return arr;
    }
    AstNode n(NodeKind::Other, "new", {std::move(type)});
    for (auto& a : arguments()) n.children.push_back(std::move(a));
    if (is_sep_at(pos_, "{")) n.children.push_back(class_body());
    return n;
  }

  AstNode class_body() {
    expect_sep("{");
    AstNode body(NodeKind::Other, "classbody");
    while (!accept_sep("}")) {
      if (at_end()) throw Unsupported{};
      const std::size_t start = pos_;
      try {
        body.children.push_back(member());
      } catch (const Unsupported&) {
        pos_ = start;
        body.children.push_back(fallback_statement());
      } catch (const ParseError&) {
        pos_ = start;
        body.children.push_back(fallback_statement());
      }
    }
    return body;
  }

  AstNode member() {
    if (is_sep_at(pos_, ";")) {
      ++pos_;
      return AstNode(NodeKind::Other, "empty");
    }
    if (is_sep_at(pos_, "{")) return block();
    if (is_kw_at(pos_, "static") && is_sep_at(pos_ + 1, "{")) {
      ++pos_;
      return block();
    }
    // Method if an identifier '(' shows up before '=', ';' or '{'.
    for (std::size_t i = pos_; i + 1 < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.is_op("=") || t.is_sep(";") || t.is_sep("{") || t.is_kw("class") ||
          t.is_kw("interface") || t.is_kw("enum")) {
        break;
      }
      if (is_ident(i) && is_sep_at(i + 1, "(")) return method_declaration();
    }
    std::size_t save = pos_;
    skip_modifiers_and_annotations();
    if (looks_like_declaration()) return local_declaration(true);
    pos_ = save;
    throw Unsupported{};
  }

  Tokens toks_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

AstNode parse_method(std::string_view source) {
  auto toks = lex_significant(source);
  if (toks.empty()) throw ParseError("empty input", 0);
  check_balanced(toks);
  return Parser(std::move(toks)).method();
}

std::optional<MethodHeader> read_method_header(std::string_view source) {
  Tokens toks;
  try {
    toks = lex_significant(source);
  } catch (const LexError&) {
    return std::nullopt;
  }
  return Parser(std::move(toks)).header();
}

}  // namespace api2com::javaparse
