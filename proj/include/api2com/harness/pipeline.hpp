#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "api2com/apikb/kb.hpp"
#include "api2com/corpus/corpus.hpp"

namespace api2com::harness {

namespace fs = std::filesystem;

struct PreprocessStats {
  std::size_t read = 0;
  std::size_t malformed = 0;  // lines rejected by the loader
  std::size_t kept = 0;
  std::map<std::string, std::size_t> dropped;  // by reason name

  nlohmann::json to_json() const;
};

/// load -> filter (with dedup) -> write the kept records with tokens.
PreprocessStats preprocess(const fs::path& in, const fs::path& out, const corpus::FilterRules& rules);

struct ExtractStats {
  std::size_t records = 0;
  std::size_t parse_errors = 0;
  std::size_t calls = 0;

  nlohmann::json to_json() const;
};

/// Adds "api_calls" ([{name, arity}]) and "flat_ast" to every record. A
/// record that fails to parse keeps empty lists and gains "parse_error".
ExtractStats extract_apis(const fs::path& in, const fs::path& out, std::size_t ast_max_len = 512);

struct KbStats {
  std::size_t entries = 0;
  std::size_t keys = 0;
  std::size_t rejected = 0;
  std::size_t malformed = 0;

  nlohmann::json to_json() const;
};

KbStats build_kb_file(const fs::path& tsv, const fs::path& out);

struct AttachStats {
  std::size_t records = 0;
  std::size_t with_docs = 0;

  nlohmann::json to_json() const;
};

/// Adds "doc_tokens" and "api_count" (resolvable calls) to every record.
AttachStats attach_docs(const apikb::ApiDocKb& kb, const fs::path& in, const fs::path& out,
                        std::size_t max_doc_len = 256);

std::vector<javaparse::ApiCall> calls_from_json(const nlohmann::json& record);

}  // namespace api2com::harness
