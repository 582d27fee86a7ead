#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace api2com::corpus {

/// Java single-character operators and separators dropped from code and
/// never allowed inside an output token.
inline constexpr std::string_view kPunctuation = "{}()[];,.<>=+-*/%!&|^~?:@";

enum class TokenizeMode { Code, Comment };

/// Splits an identifier at underscores and lower-to-upper case boundaries.
/// An uppercase run stays together until its last letter starts a lowercase
/// word ("parseHTTPResponse" -> parse, http, response). Output is lowercase.
std::vector<std::string> split_subtokens(std::string_view identifier);

/// Code mode lexes Java, drops comments and punctuation, subtoken-splits
/// identifiers and literal words. Comment mode keeps the first sentence,
/// splits on whitespace and strips punctuation.
std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode);

/// Comment-mode tokenization of the whole text, without first-sentence cut.
std::vector<std::string> tokenize_text(std::string_view text);

/// Text up to the first period that ends a sentence (followed by whitespace or
/// end of input).
std::string_view first_sentence(std::string_view text);

std::string join_tokens(const std::vector<std::string>& tokens, char sep = ' ');

}  // namespace api2com::corpus
