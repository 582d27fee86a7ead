#include "api2com/nnet/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include "api2com/apikb/kb.hpp"
#include "api2com/corpus/tokenize.hpp"
#include "api2com/javaparse/ast.hpp"
#include "api2com/util/jsonl.hpp"

namespace api2com::nnet {

using nlohmann::json;

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  for (const auto& t : j.at(key)) out.push_back(t.get<std::string>());
  return out;
}

std::vector<int> encode_source(const std::vector<std::string>& tokens, const corpus::Vocab& v,
                               std::size_t limit) {
  if (tokens.empty()) return {corpus::kPad};
  return corpus::encode_sequence(tokens, v, limit + 2, false);
}

}  // namespace

SourceRecord record_from_json(const json& j) {
  SourceRecord r;
  if (j.contains("id")) r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  if (j.contains("code_tokens")) {
    r.code_tokens = string_list(j, "code_tokens");
  } else if (j.contains("code")) {
    r.code_tokens = corpus::tokenize(j.at("code").get<std::string>(), corpus::TokenizeMode::Code);
  } else {
    throw std::invalid_argument("record has neither code_tokens nor code");
  }
  if (j.contains("flat_ast")) {
    r.ast_tokens = normalize_ast(string_list(j, "flat_ast"));
  } else if (j.contains("code")) {
    try {
      r.ast_tokens = normalize_ast(javaparse::flatten_ast(javaparse::parse_method(j.at("code").get<std::string>())));
    } catch (const std::exception&) {
      r.ast_tokens.clear();
    }
  }
  if (j.contains("doc_tokens")) r.doc_tokens = string_list(j, "doc_tokens");
  if (j.contains("comment_tokens")) {
    r.comment_tokens = string_list(j, "comment_tokens");
  } else if (j.contains("docstring")) {
    r.comment_tokens = corpus::tokenize(j.at("docstring").get<std::string>(), corpus::TokenizeMode::Comment);
  } else {
    throw std::invalid_argument("record has neither comment_tokens nor docstring");
  }
  return r;
}

std::vector<SourceRecord> load_records(const std::filesystem::path& path) {
  auto lines = util::read_jsonl(path);
  if (!lines.errors.empty()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lines.errors[0].first) + ": " +
                             lines.errors[0].second);
  }
  std::vector<SourceRecord> out;
  out.reserve(lines.objects.size());
  for (std::size_t i = 0; i < lines.objects.size(); ++i) {
    try {
      out.push_back(record_from_json(lines.objects[i]));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::string> normalize_ast(const std::vector<std::string>& flat) {
  std::vector<std::string> out;
  out.reserve(flat.size());
  for (const auto& t : flat) {
    if (t == "(" || t == ")") {
      out.push_back(t);
      continue;
    }
    auto parts = corpus::tokenize(t, corpus::TokenizeMode::Code);
    if (parts.empty()) {
      out.push_back(t);
    } else {
      for (auto& p : parts) out.push_back(std::move(p));
    }
  }
  return out;
}

void Vocabs::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  code.save(dir / "code.vocab.tsv");
  ast.save(dir / "ast.vocab.tsv");
  doc.save(dir / "doc.vocab.tsv");
  comment.save(dir / "comment.vocab.tsv");
}

Vocabs Vocabs::load(const std::filesystem::path& dir) {
  return {corpus::Vocab::load(dir / "code.vocab.tsv"), corpus::Vocab::load(dir / "ast.vocab.tsv"),
          corpus::Vocab::load(dir / "doc.vocab.tsv"), corpus::Vocab::load(dir / "comment.vocab.tsv")};
}

Vocabs build_vocabs(const std::vector<SourceRecord>& train, const ModelConfig& config) {
  if (train.empty()) throw std::invalid_argument("cannot build vocabularies from an empty training set");
  std::vector<std::vector<std::string>> code, ast, doc, comment;
  for (const auto& r : train) {
    code.push_back(r.code_tokens);
    ast.push_back(r.ast_tokens);
    doc.push_back(r.doc_tokens);
    comment.push_back(r.comment_tokens);
  }
  return {corpus::build_vocab(code, config.min_count, config.max_vocab),
          corpus::build_vocab(ast, config.min_count, config.max_vocab, {"(", ")"}),
          corpus::build_vocab(doc, config.min_count, config.max_vocab, {std::string(apikb::kSepToken)}),
          corpus::build_vocab(comment, config.min_count, config.max_vocab)};
}

Example encode_example(const SourceRecord& r, const Vocabs& v, const ModelConfig& config) {
  Example ex;
  ex.code = encode_source(r.code_tokens, v.code, config.max_code_len);
  ex.ast = encode_source(r.ast_tokens, v.ast, config.max_ast_len);
  ex.doc = encode_source(r.doc_tokens, v.doc, config.max_doc_len);
  ex.comment = corpus::encode_sequence(r.comment_tokens, v.comment, config.max_comment_len + 2, false);
  return ex;
}

std::vector<Example> encode_all(const std::vector<SourceRecord>& rs, const Vocabs& v, const ModelConfig& config) {
  std::vector<Example> out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back(encode_example(r, v, config));
  return out;
}

}  // namespace api2com::nnet
