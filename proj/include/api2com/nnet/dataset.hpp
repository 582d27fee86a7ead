#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "api2com/corpus/vocab.hpp"
#include "api2com/nnet/config.hpp"
#include "api2com/nnet/model.hpp"

namespace api2com::nnet {

/// Token-level view of one method as consumed by the model.
struct SourceRecord {
  std::string id;
  std::vector<std::string> code_tokens;
  std::vector<std::string> ast_tokens;
  std::vector<std::string> doc_tokens;
  std::vector<std::string> comment_tokens;
};

/// Reads "code_tokens", "flat_ast", "doc_tokens" and "comment_tokens"; any
/// missing list is derived from "code" / "docstring" when present (docs
/// default to empty).
SourceRecord record_from_json(const nlohmann::json& j);

/// Loads a JSONL file; throws on the first malformed line.
std::vector<SourceRecord> load_records(const std::filesystem::path& path);

/// Keeps bracket markers and node kinds, splits labels into lowercase
/// subtokens (operator labels are kept as they are).
std::vector<std::string> normalize_ast(const std::vector<std::string>& flat);

struct Vocabs {
  corpus::Vocab code;
  corpus::Vocab ast;
  corpus::Vocab doc;
  corpus::Vocab comment;

  VocabSizes sizes() const { return {code.size(), ast.size(), doc.size(), comment.size()}; }
  /// code.vocab.tsv, ast.vocab.tsv, doc.vocab.tsv, comment.vocab.tsv
  void save(const std::filesystem::path& dir) const;
  static Vocabs load(const std::filesystem::path& dir);
};

Vocabs build_vocabs(const std::vector<SourceRecord>& train, const ModelConfig& config);

/// Ids for every source; an empty source becomes a single PAD.
Example encode_example(const SourceRecord& r, const Vocabs& v, const ModelConfig& config);
std::vector<Example> encode_all(const std::vector<SourceRecord>& rs, const Vocabs& v, const ModelConfig& config);

}  // namespace api2com::nnet
