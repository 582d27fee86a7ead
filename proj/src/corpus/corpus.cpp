#include "api2com/corpus/corpus.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "api2com/corpus/tokenize.hpp"
#include "api2com/javaparse/ast.hpp"
#include "api2com/javaparse/lexer.hpp"

namespace api2com::corpus {

using nlohmann::json;

LoadResult load_corpus(std::istream& in) {
  LoadResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw std::runtime_error("line is not a JSON object");
      for (const char* key : {"code", "docstring"}) {
        if (!j.contains(key) || !j[key].is_string()) {
          throw std::runtime_error(std::string("missing string field \"") + key + "\"");
        }
      }
      MethodRecord r;
      r.source = j["code"].get<std::string>();
      r.comment = j["docstring"].get<std::string>();
      if (j.contains("id") && j["id"].is_string()) {
        r.id = j["id"].get<std::string>();
      } else if (j.contains("id") && j["id"].is_number_integer()) {
        r.id = std::to_string(j["id"].get<long long>());
      } else {
        r.id = std::to_string(lineno);
      }
      if (j.contains("code_tokens") && j["code_tokens"].is_array()) {
        r.code_tokens = j["code_tokens"].get<std::vector<std::string>>();
      }
      if (j.contains("comment_tokens") && j["comment_tokens"].is_array()) {
        r.comment_tokens = j["comment_tokens"].get<std::vector<std::string>>();
      }
      result.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      result.errors.push_back({lineno, e.what()});
    }
  }
  return result;
}

LoadResult load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  return load_corpus(in);
}

void tokenize_record(MethodRecord& r) {
  r.code_tokens = tokenize(r.source, TokenizeMode::Code);
  r.comment_tokens = tokenize(r.comment, TokenizeMode::Comment);
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::CommentTooShort: return "comment_too_short";
    case DropReason::TooFewLines: return "too_few_lines";
    case DropReason::TestName: return "test_name";
    case DropReason::Constructor: return "constructor";
    case DropReason::CodeTooLong: return "code_too_long";
    case DropReason::CommentTooLong: return "comment_too_long";
    case DropReason::Unparsable: return "unparsable";
    case DropReason::Duplicate: return "duplicate";
  }
  return "unknown";
}

namespace {

std::size_t count_lines(std::string_view s) {
  std::size_t lines = 0;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    auto line = s.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) ++lines;
    start = end + 1;
  }
  return lines;
}

bool contains_test(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower.find("test") != std::string::npos;
}

}  // namespace

FilterDecision filter_record(MethodRecord& r, const FilterRules& rules) {
  if (r.code_tokens.empty() && r.comment_tokens.empty()) tokenize_record(r);
  auto drop = [](DropReason why) { return FilterDecision{false, why}; };

  if (r.comment_tokens.size() < rules.min_comment_tokens) return drop(DropReason::CommentTooShort);
  if (count_lines(r.source) < rules.min_source_lines) return drop(DropReason::TooFewLines);
  const auto header = javaparse::read_method_header(r.source);
  if (header && contains_test(header->name)) return drop(DropReason::TestName);
  if (header && header->is_constructor) return drop(DropReason::Constructor);
  if (r.code_tokens.size() > rules.max_code_len) return drop(DropReason::CodeTooLong);
  if (r.comment_tokens.size() > rules.max_comment_len) return drop(DropReason::CommentTooLong);
  if (rules.require_parse) {
    try {
      javaparse::parse_method(r.source);
    } catch (const std::exception&) {
      return drop(DropReason::Unparsable);
    }
  }
  return {};
}

std::string dedup_key(std::string_view source) {
  std::string key;
  bool pending_space = false;
  for (char c : source) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !key.empty();
      continue;
    }
    if (pending_space) key.push_back(' ');
    pending_space = false;
    key.push_back(c);
  }
  return key;
}

std::size_t FilterSummary::count(DropReason r) const {
  std::size_t n = 0;
  for (const auto& d : dropped) n += d.second == r;
  return n;
}

FilterSummary filter_corpus(std::vector<MethodRecord> records, const FilterRules& rules) {
  FilterSummary out;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    const auto d = filter_record(r, rules);
    if (!d.keep) {
      out.dropped.emplace_back(i, *d.reason);
      continue;
    }
    if (!seen.insert(dedup_key(r.source)).second) {
      out.dropped.emplace_back(i, DropReason::Duplicate);
      continue;
    }
    out.kept.push_back(std::move(r));
  }
  return out;
}

void write_corpus(std::ostream& out, const std::vector<MethodRecord>& records) {
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["code"] = r.source;
    j["docstring"] = r.comment;
    j["code_tokens"] = r.code_tokens;
    j["comment_tokens"] = r.comment_tokens;
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

}  // namespace api2com::corpus
