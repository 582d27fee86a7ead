#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace api2com::corpus {

struct MethodRecord {
  std::string id;
  std::string source;
  std::string comment;
  std::vector<std::string> code_tokens;
  std::vector<std::string> comment_tokens;
};

struct RecordError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadResult {
  std::vector<MethodRecord> records;
  std::vector<RecordError> errors;
};

/// Reads a JSONL corpus with "code" and "docstring" per line (optional "id";
/// defaults to the line number). Bad lines are reported and skipped.
LoadResult load_corpus(std::istream& in);
LoadResult load_corpus(const std::filesystem::path& path);

/// Fills code_tokens and comment_tokens from source and comment.
void tokenize_record(MethodRecord& r);

struct FilterRules {
  std::size_t max_code_len = 256;
  std::size_t max_comment_len = 64;
  std::size_t min_comment_tokens = 3;
  std::size_t min_source_lines = 3;
  bool require_parse = true;
};

enum class DropReason {
  CommentTooShort,
  TooFewLines,
  TestName,
  Constructor,
  CodeTooLong,
  CommentTooLong,
  Unparsable,
  Duplicate,
};

std::string_view to_string(DropReason r);

struct FilterDecision {
  bool keep = true;
  std::optional<DropReason> reason;
};

/// Per-record rules, checked in DropReason order; the first violation wins.
/// Tokenizes the record when its token fields are empty. Duplicates are a
/// corpus-level property handled by filter_corpus.
FilterDecision filter_record(MethodRecord& r, const FilterRules& rules);

/// Whitespace-normalized source used as the duplicate key.
std::string dedup_key(std::string_view source);

struct FilterSummary {
  std::vector<MethodRecord> kept;
  std::vector<std::pair<std::size_t, DropReason>> dropped;  // (input index, reason)

  std::size_t count(DropReason r) const;
};

/// Applies filter_record to every record, then drops later duplicates of an
/// already kept body.
FilterSummary filter_corpus(std::vector<MethodRecord> records, const FilterRules& rules);

/// Writes records as JSONL with "id", "code", "docstring", "code_tokens",
/// "comment_tokens".
void write_corpus(std::ostream& out, const std::vector<MethodRecord>& records);

}  // namespace api2com::corpus
