#include "api2com/harness/pipeline.hpp"

#include <fstream>
#include <stdexcept>

#include "api2com/harness/stratify.hpp"
#include "api2com/javaparse/ast.hpp"
#include "api2com/javaparse/lexer.hpp"
#include "api2com/util/jsonl.hpp"

namespace api2com::harness {

using nlohmann::json;

json PreprocessStats::to_json() const {
  return {{"read", read}, {"malformed", malformed}, {"kept", kept}, {"dropped", dropped}};
}

json ExtractStats::to_json() const {
  return {{"records", records}, {"parse_errors", parse_errors}, {"calls", calls}};
}

json KbStats::to_json() const {
  return {{"entries", entries}, {"keys", keys}, {"rejected", rejected}, {"malformed", malformed}};
}

json AttachStats::to_json() const { return {{"records", records}, {"with_docs", with_docs}}; }

PreprocessStats preprocess(const fs::path& in, const fs::path& out, const corpus::FilterRules& rules) {
  auto loaded = corpus::load_corpus(in);
  PreprocessStats s;
  s.malformed = loaded.errors.size();
  s.read = loaded.records.size() + s.malformed;
  auto summary = corpus::filter_corpus(std::move(loaded.records), rules);
  s.kept = summary.kept.size();
  for (const auto& [idx, reason] : summary.dropped) ++s.dropped[std::string(corpus::to_string(reason))];
  std::ofstream o(out);
  if (!o) throw std::runtime_error("cannot write " + out.string());
  corpus::write_corpus(o, summary.kept);
  return s;
}

ExtractStats extract_apis(const fs::path& in, const fs::path& out, std::size_t ast_max_len) {
  auto lines = util::read_jsonl(in);
  if (!lines.errors.empty()) {
    throw std::runtime_error(in.string() + ":" + std::to_string(lines.errors[0].first) + ": " +
                             lines.errors[0].second);
  }
  ExtractStats s;
  for (auto& j : lines.objects) {
    ++s.records;
    j["api_calls"] = json::array();
    j["flat_ast"] = json::array();
    try {
      const auto ast = javaparse::parse_method(j.at("code").get<std::string>());
      for (const auto& c : javaparse::extract_api_calls(ast)) {
        j["api_calls"].push_back({{"name", c.name}, {"arity", c.arity}});
        ++s.calls;
      }
      j["flat_ast"] = javaparse::flatten_ast(ast, ast_max_len);
    } catch (const javaparse::ParseError& e) {
      ++s.parse_errors;
      j["parse_error"] = {{"message", e.what()}, {"offset", e.offset()}};
    } catch (const javaparse::LexError& e) {
      ++s.parse_errors;
      j["parse_error"] = {{"message", e.what()}, {"offset", e.offset()}};
    }
  }
  util::write_jsonl(out, lines.objects);
  return s;
}

KbStats build_kb_file(const fs::path& tsv, const fs::path& out) {
  auto rows = apikb::read_kb_tsv(tsv);
  auto built = apikb::build_kb(rows.entries);
  built.kb.save(out);
  return {rows.entries.size(), built.kb.size(), built.rejected, rows.malformed};
}

std::vector<javaparse::ApiCall> calls_from_json(const json& record) {
  std::vector<javaparse::ApiCall> calls;
  if (!record.contains("api_calls")) return calls;
  std::size_t pos = 0;
  for (const auto& c : record.at("api_calls")) {
    calls.push_back({c.at("name").get<std::string>(), c.at("arity").get<std::size_t>(), pos++});
  }
  return calls;
}

AttachStats attach_docs(const apikb::ApiDocKb& kb, const fs::path& in, const fs::path& out, std::size_t max_doc_len) {
  auto lines = util::read_jsonl(in);
  if (!lines.errors.empty()) {
    throw std::runtime_error(in.string() + ":" + std::to_string(lines.errors[0].first) + ": " +
                             lines.errors[0].second);
  }
  AttachStats s;
  for (auto& j : lines.objects) {
    if (!j.contains("api_calls")) throw std::runtime_error("record without api_calls; run extract-apis first");
    const auto calls = calls_from_json(j);
    const auto docs = apikb::docs_for_method(kb, calls, max_doc_len);
    j["doc_tokens"] = docs;
    j["api_count"] = resolvable_api_count(kb, calls);
    ++s.records;
    s.with_docs += !docs.empty();
  }
  util::write_jsonl(out, lines.objects);
  return s;
}

}  // namespace api2com::harness
