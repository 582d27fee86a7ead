#include "api2com/apikb/kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "api2com/corpus/tokenize.hpp"

namespace api2com::apikb {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "api2com-kb";
constexpr int kVersion = 1;

void sort_candidates(std::vector<DocCandidate>& c) {
  std::sort(c.begin(), c.end(), [](const DocCandidate& a, const DocCandidate& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.description < b.description;
  });
}
}  // namespace

struct KbBuilder {
  static ApiDocKb make(std::map<ApiKey, std::vector<DocCandidate>> index) {
    ApiDocKb kb;
    kb.index_ = std::move(index);
    return kb;
  }
};

const std::vector<DocCandidate>* ApiDocKb::candidates(const ApiKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &it->second;
}

bool ApiDocKb::has_name(const std::string& name) const {
  auto it = index_.lower_bound(ApiKey{name, 0});
  return it != index_.end() && it->first.first == name;
}

void ApiDocKb::save(std::ostream& out) const {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["entries"] = json::array();
  for (const auto& [key, cands] : index_) {
    json e;
    e["name"] = key.first;
    e["arity"] = key.second;
    e["candidates"] = json::array();
    for (const auto& c : cands) {
      e["candidates"].push_back({{"description", c.description}, {"frequency", c.frequency}});
    }
    j["entries"].push_back(std::move(e));
  }
  out << j.dump(1, ' ', false, json::error_handler_t::replace) << '\n';
}

void ApiDocKb::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write KB " + path.string());
  save(out);
}

ApiDocKb ApiDocKb::load(std::istream& in) {
  const json j = json::parse(in);
  if (j.value("format", "") != kFormat) throw std::runtime_error("not an API doc KB file");
  if (j.value("version", 0) != kVersion) {
    throw std::runtime_error("unsupported KB version " + std::to_string(j.value("version", 0)));
  }
  std::map<ApiKey, std::vector<DocCandidate>> index;
  for (const auto& e : j.at("entries")) {
    auto& cands = index[{e.at("name").get<std::string>(), e.at("arity").get<std::size_t>()}];
    for (const auto& c : e.at("candidates")) {
      cands.push_back({c.at("description").get<std::string>(), c.at("frequency").get<std::size_t>()});
    }
    sort_candidates(cands);
  }
  return KbBuilder::make(std::move(index));
}

ApiDocKb ApiDocKb::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open KB " + path.string());
  return load(in);
}

BuildResult build_kb(const std::vector<ApiDocEntry>& entries) {
  BuildResult result;
  std::set<std::tuple<std::string, std::size_t, std::string>> seen;
  std::map<ApiKey, std::map<std::string, std::size_t>> grouped;
  for (const auto& e : entries) {
    if (e.name.empty() || e.description.empty() ||
        !seen.emplace(e.name, e.arity, e.class_path).second) {
      ++result.rejected;
      continue;
    }
    ++grouped[{e.name, e.arity}][e.description];
  }
  std::map<ApiKey, std::vector<DocCandidate>> index;
  for (auto& [key, texts] : grouped) {
    auto& cands = index[key];
    for (auto& [text, n] : texts) cands.push_back({text, n});
    sort_candidates(cands);
  }
  result.kb = KbBuilder::make(std::move(index));
  return result;
}

TsvReadResult read_kb_tsv(std::istream& in) {
  TsvReadResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string f;
    while (std::getline(row, f, '\t')) fields.push_back(f);
    if (fields.size() != 4) {
      ++out.malformed;
      continue;
    }
    try {
      std::size_t used = 0;
      const unsigned long arity = std::stoul(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("arity");
      out.entries.push_back({fields[0], arity, fields[2], fields[3]});
    } catch (const std::exception&) {
      ++out.malformed;
    }
  }
  return out;
}

TsvReadResult read_kb_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_kb_tsv(in);
}

std::optional<std::string> resolve_doc(const ApiDocKb& kb, const javaparse::ApiCall& call) {
  const auto* cands = kb.candidates({call.name, call.arity});
  if (!cands || cands->empty()) return std::nullopt;
  return cands->front().description;
}

std::vector<std::string> resolved_docs(const ApiDocKb& kb,
                                       const std::vector<javaparse::ApiCall>& calls) {
  std::vector<std::string> docs;
  const javaparse::ApiCall* last = nullptr;
  for (const auto& c : calls) {
    auto doc = resolve_doc(kb, c);
    if (!doc) continue;
    if (last && last->name == c.name && last->arity == c.arity) continue;
    last = &c;
    docs.push_back(std::move(*doc));
  }
  return docs;
}

std::vector<std::string> docs_for_method(const ApiDocKb& kb,
                                         const std::vector<javaparse::ApiCall>& calls,
                                         std::size_t max_doc_len) {
  std::vector<std::string> out;
  for (const auto& doc : resolved_docs(kb, calls)) {
    if (!out.empty()) out.emplace_back(kSepToken);
    for (auto& t : corpus::tokenize_text(doc)) out.push_back(std::move(t));
  }
  if (out.size() > max_doc_len) out.resize(max_doc_len);
  return out;
}

}  // namespace api2com::apikb
