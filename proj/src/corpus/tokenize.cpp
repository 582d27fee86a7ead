#include "api2com/corpus/tokenize.hpp"

#include <cctype>

#include "api2com/javaparse/lexer.hpp"

namespace api2com::corpus {

namespace {

using javaparse::TokenClass;

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '$' || u >= 0x80;
}

bool is_punct(char c) { return kPunctuation.find(c) != std::string_view::npos; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename Pred>
void split_runs(std::string_view text, Pred keep, std::vector<std::string_view>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !keep(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && keep(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
}

void append_words(std::string_view text, bool camel, std::vector<std::string>& out) {
  std::vector<std::string_view> runs;
  split_runs(text, is_word_char, runs);
  for (auto r : runs) {
    if (camel) {
      for (auto& s : split_subtokens(r)) out.push_back(std::move(s));
    } else {
      out.push_back(lower(r));
    }
  }
}

std::vector<std::string> tokenize_code(std::string_view text) {
  std::vector<std::string> out;
  std::vector<javaparse::Token> toks;
  try {
    toks = javaparse::lex_java(text);
  } catch (const javaparse::LexError&) {
    append_words(text, true, out);
    return out;
  }
  for (const auto& t : toks) {
    switch (t.cls) {
      case TokenClass::Identifier:
      case TokenClass::Keyword:
      case TokenClass::String:
      case TokenClass::Char:
      case TokenClass::Operator:  // stray characters the lexer could not classify
        append_words(t.text, true, out);
        break;
      case TokenClass::Number:
        append_words(t.text, false, out);
        break;
      case TokenClass::Separator:
      case TokenClass::Comment:
      case TokenClass::Whitespace:
        break;
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> split_subtokens(std::string_view identifier) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    const char c = identifier[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (is_upper(c) && !cur.empty()) {
      const char prev = cur.back();
      const bool next_lower = i + 1 < identifier.size() && !is_upper(identifier[i + 1]) &&
                              identifier[i + 1] != '_' &&
                              std::isalpha(static_cast<unsigned char>(identifier[i + 1]));
      if (!is_upper(prev) || next_lower) flush();
    }
    cur.push_back(c);
  }
  flush();
  return out;
}

std::string_view first_sentence(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '.') continue;
    if (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1]))) {
      return text.substr(0, i);
    }
  }
  return text;
}

std::vector<std::string> tokenize_text(std::string_view text) {
  std::vector<std::string> out;
  std::vector<std::string_view> words;
  split_runs(text, [](char c) { return !std::isspace(static_cast<unsigned char>(c)); }, words);
  for (auto w : words) {
    std::size_t b = 0, e = w.size();
    while (b < e && !is_word_char(w[b])) ++b;
    while (e > b && !is_word_char(w[e - 1])) --e;
    std::vector<std::string_view> parts;
    split_runs(w.substr(b, e - b), [](char c) { return !is_punct(c); }, parts);
    for (auto p : parts) out.push_back(lower(p));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode) {
  if (mode == TokenizeMode::Code) return tokenize_code(text);
  return tokenize_text(first_sentence(text));
}

std::string join_tokens(const std::vector<std::string>& tokens, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

}  // namespace api2com::corpus
