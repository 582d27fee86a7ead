#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "api2com/javaparse/ast.hpp"

namespace api2com::apikb {

/// One row of a JDK method summary table.
struct ApiDocEntry {
  std::string name;
  std::size_t arity = 0;
  std::string class_path;
  std::string description;
};

struct DocCandidate {
  std::string description;
  std::size_t frequency = 0;  // classes sharing this exact text

  friend bool operator==(const DocCandidate&, const DocCandidate&) = default;
};

using ApiKey = std::pair<std::string, std::size_t>;  // (simple name, arity)

/// Documentation index keyed by (name, arity). Candidates under a key are
/// distinct texts ordered by frequency (desc), then text.
class ApiDocKb {
 public:
  const std::vector<DocCandidate>* candidates(const ApiKey& key) const;
  bool has_name(const std::string& name) const;
  std::size_t size() const { return index_.size(); }
  const std::map<ApiKey, std::vector<DocCandidate>>& index() const { return index_; }

  /// JSON index with a versioned header.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static ApiDocKb load(std::istream& in);
  static ApiDocKb load(const std::filesystem::path& path);

  friend bool operator==(const ApiDocKb&, const ApiDocKb&) = default;

 private:
  friend struct KbBuilder;
  std::map<ApiKey, std::vector<DocCandidate>> index_;
};

struct BuildResult {
  ApiDocKb kb;
  std::size_t rejected = 0;  // empty name/description or repeated (name, arity, class)
};

BuildResult build_kb(const std::vector<ApiDocEntry>& entries);

struct TsvReadResult {
  std::vector<ApiDocEntry> entries;
  std::size_t malformed = 0;
};

/// Rows "name\tarity\tclass_path\tdescription"; '#' lines are comments.
TsvReadResult read_kb_tsv(std::istream& in);
TsvReadResult read_kb_tsv(const std::filesystem::path& path);

/// Highest-frequency description for the exact (name, arity); ties go to the
/// lexicographically smallest text. Arity mismatches resolve to nothing.
std::optional<std::string> resolve_doc(const ApiDocKb& kb, const javaparse::ApiCall& call);

inline constexpr std::string_view kSepToken = "<sep>";

/// Descriptions of the resolvable calls, consecutive repeats of the same
/// (name, arity) collapsed, in call order.
std::vector<std::string> resolved_docs(const ApiDocKb& kb,
                                       const std::vector<javaparse::ApiCall>& calls);

/// Tokenized descriptions joined by kSepToken, cut to max_doc_len.
std::vector<std::string> docs_for_method(const ApiDocKb& kb,
                                         const std::vector<javaparse::ApiCall>& calls,
                                         std::size_t max_doc_len = 256);

}  // namespace api2com::apikb
