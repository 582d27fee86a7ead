#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace api2com::javaparse {

enum class TokenClass {
  Identifier,
  Keyword,
  Number,
  String,
  Char,
  Operator,
  Separator,
  Comment,
  Whitespace,
};

std::string_view to_string(TokenClass cls);

struct Token {
  std::string text;
  TokenClass cls;
  std::size_t offset;  // byte offset into the source

  bool skippable() const {
    return cls == TokenClass::Comment || cls == TokenClass::Whitespace;
  }
  bool is(TokenClass c, std::string_view t) const { return cls == c && text == t; }
  bool is_sep(std::string_view t) const { return cls == TokenClass::Separator && text == t; }
  bool is_op(std::string_view t) const { return cls == TokenClass::Operator && text == t; }
  bool is_kw(std::string_view t) const { return cls == TokenClass::Keyword && text == t; }
};

class LexError : public std::runtime_error {
 public:
  LexError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

/// Splits Java source into tokens. Every byte of the input lands in exactly
/// one token, so concatenating the token texts reproduces the source.
/// String, char and text-block literals and comments are single tokens.
/// Throws LexError on an unterminated literal or block comment.
std::vector<Token> lex_java(std::string_view source);

/// Same as lex_java with whitespace and comment tokens removed.
std::vector<Token> lex_significant(std::string_view source);

}  // namespace api2com::javaparse
