#include "api2com/javaparse/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace api2com::javaparse {

namespace {

constexpr std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",     "boolean",   "break",     "byte",         "case",
    "catch",    "char",       "class",     "const",     "continue",     "default",
    "do",       "double",     "else",      "enum",      "extends",      "final",
    "finally",  "float",      "for",       "goto",      "if",           "implements",
    "import",   "instanceof", "int",       "interface", "long",         "native",
    "new",      "package",    "private",   "protected", "public",       "return",
    "short",    "static",     "strictfp",  "super",     "switch",       "synchronized",
    "this",     "throw",      "throws",    "transient", "try",          "void",
    "volatile", "while",      "true",      "false",     "null",
};

constexpr std::array<std::string_view, 9> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
};

// Longest match first.
constexpr std::array<std::string_view, 25> kMultiCharPunct = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--",
    "&&",   "||",  "==",  "!=",  "<=",  ">=", "+=", "-=", "*=",
    "/=",   "&=",  "|=",  "^=",  "%=",  "<<", ">>",
};

bool is_ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }

bool is_separator_text(std::string_view t) {
  return t == "(" || t == ")" || t == "{" || t == "}" || t == "[" || t == "]" ||
         t == ";" || t == "," || t == "." || t == "@" || t == "..." || t == "::";
}

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) out.push_back(next());
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  Token make(std::size_t start, TokenClass cls) const {
    return Token{std::string(src_.substr(start, pos_ - start)), cls, start};
  }

  Token next() {
    const std::size_t start = pos_;
    const auto c = static_cast<unsigned char>(peek());

    if (std::isspace(c)) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
      return make(start, TokenClass::Whitespace);
    }
    if (c == '/' && peek(1) == '/') {
      while (pos_ < src_.size() && peek() != '\n') ++pos_;
      return make(start, TokenClass::Comment);
    }
    if (c == '/' && peek(1) == '*') {
      const auto end = src_.find("*/", pos_ + 2);
      if (end == std::string_view::npos) throw LexError("unterminated block comment", start);
      pos_ = end + 2;
      return make(start, TokenClass::Comment);
    }
    if (c == '"') return string_literal(start);
    if (c == '\'') return quoted(start, '\'', TokenClass::Char);
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number(start);
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(peek()))) ++pos_;
      Token t = make(start, TokenClass::Identifier);
      if (is_java_keyword(t.text)) t.cls = TokenClass::Keyword;
      return t;
    }
    for (std::string_view p : kMultiCharPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        pos_ += p.size();
        return make(start, is_separator_text(p) ? TokenClass::Separator : TokenClass::Operator);
      }
    }
    ++pos_;
    Token t = make(start, TokenClass::Operator);
    if (is_separator_text(t.text)) t.cls = TokenClass::Separator;
    return t;
  }

  Token string_literal(std::size_t start) {
    if (src_.substr(pos_, 3) == "\"\"\"") {
      const auto end = src_.find("\"\"\"", pos_ + 3);
      if (end == std::string_view::npos) throw LexError("unterminated text block", start);
      pos_ = end + 3;
      return make(start, TokenClass::String);
    }
    return quoted(start, '"', TokenClass::String);
  }

  Token quoted(std::size_t start, char quote, TokenClass cls) {
    ++pos_;
    while (pos_ < src_.size()) {
      const char ch = peek();
      if (ch == '\\') {
        pos_ += 2;
        continue;
      }
      if (ch == '\n') break;
      ++pos_;
      if (ch == quote) return make(start, cls);
    }
    throw LexError(cls == TokenClass::String ? "unterminated string literal"
                                             : "unterminated char literal",
                   start);
  }

  Token number(std::size_t start) {
    const bool hex = peek() == '0' && (peek(1) == 'x' || peek(1) == 'X');
    while (pos_ < src_.size()) {
      const auto ch = static_cast<unsigned char>(peek());
      if (std::isalnum(ch) || ch == '_' || ch == '.') {
        ++pos_;
        const bool exp = hex ? (ch == 'p' || ch == 'P') : (ch == 'e' || ch == 'E');
        if (exp && (peek() == '+' || peek() == '-')) ++pos_;
        continue;
      }
      break;
    }
    return make(start, TokenClass::Number);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

LexError::LexError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

std::string_view to_string(TokenClass cls) {
  switch (cls) {
    case TokenClass::Identifier: return "identifier";
    case TokenClass::Keyword: return "keyword";
    case TokenClass::Number: return "number";
    case TokenClass::String: return "string";
    case TokenClass::Char: return "char";
    case TokenClass::Operator: return "operator";
    case TokenClass::Separator: return "separator";
    case TokenClass::Comment: return "comment";
    case TokenClass::Whitespace: return "whitespace";
  }
  return "unknown";
}

bool is_java_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_primitive_type(std::string_view word) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), word) != kPrimitives.end();
}

std::vector<Token> lex_java(std::string_view source) { return Scanner(source).run(); }

std::vector<Token> lex_significant(std::string_view source) {
  auto all = lex_java(source);
  std::erase_if(all, [](const Token& t) { return t.skippable(); });
  return all;
}

}  // namespace api2com::javaparse
