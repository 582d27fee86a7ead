#include "api2com/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "api2com/util/hash.hpp"

namespace api2com::corpus {

namespace {
const std::string kReservedNames[] = {"<pad>", "unk", "<s>", "</s>"};
const std::string kReservedTsv[] = {"<pad>", "<unk>", "<s>", "</s>"};
}  // namespace

Vocab::Vocab() {
  for (const auto& r : kReservedTsv) {
    token_to_id_.emplace(r, static_cast<TokenId>(id_to_token_.size()));
    id_to_token_.push_back(r);
  }
}

void Vocab::add(const std::string& token) {
  if (token_to_id_.contains(token)) return;
  token_to_id_.emplace(token, static_cast<TokenId>(id_to_token_.size()));
  id_to_token_.push_back(token);
}

TokenId Vocab::encode(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end() || it->second < kFirstFreeId) return kUnk;
  return it->second;
}

const std::string& Vocab::decode(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) return kReservedNames[kUnk];
  if (id < kFirstFreeId) return kReservedNames[id];
  return id_to_token_[static_cast<std::size_t>(id)];
}

bool Vocab::contains(std::string_view token) const { return encode(token) != kUnk; }

std::size_t Vocab::frequency(std::string_view token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

void Vocab::save(std::ostream& out) const {
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    out << id_to_token_[i] << '\t' << i << '\t' << frequency(id_to_token_[i]) << '\n';
  }
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocab " + path.string());
  save(out);
}

Vocab Vocab::load(std::istream& in) {
  Vocab v;
  std::string line;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    std::size_t id = 0, count = 0;
    if (!std::getline(row, token, '\t') || !(row >> id >> count) || id != expected) {
      throw std::runtime_error("malformed vocab row: " + line);
    }
    ++expected;
    if (id < static_cast<std::size_t>(kFirstFreeId)) continue;
    v.add(token);
    v.counts_[token] = count;
  }
  return v;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocab " + path.string());
  return load(in);
}

std::string Vocab::hash() const {
  std::ostringstream ss;
  save(ss);
  return util::sha256_hex(ss.str());
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count,
                  std::size_t max_size, const std::vector<std::string>& always_keep) {
  if (sequences.empty()) throw std::invalid_argument("cannot build a vocabulary from an empty corpus");
  Vocab v;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) ++v.counts_[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (const auto& [tok, n] : v.counts_) {
    const bool forced = std::find(always_keep.begin(), always_keep.end(), tok) != always_keep.end();
    if (!forced && n >= min_count) ranked.emplace_back(tok, n);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (const auto& t : always_keep) v.add(t);
  for (std::size_t i = 0; i < ranked.size() && v.size() - kFirstFreeId < max_size; ++i) {
    v.add(ranked[i].first);
  }
  return v;
}

Vocab build_vocab(const std::vector<MethodRecord>& records, Side side, std::size_t min_count,
                  std::size_t max_size) {
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(records.size());
  for (const auto& r : records) {
    seqs.push_back(side == Side::Code ? r.code_tokens : r.comment_tokens);
  }
  return build_vocab(seqs, min_count, max_size);
}

std::vector<TokenId> encode_sequence(const std::vector<std::string>& tokens, const Vocab& vocab,
                                     std::size_t max_len, bool pad) {
  if (max_len < 2) throw std::invalid_argument("max_len must leave room for BOS and EOS");
  std::vector<TokenId> ids;
  ids.reserve(max_len);
  ids.push_back(kBos);
  for (std::size_t i = 0; i < tokens.size() && ids.size() + 1 < max_len; ++i) {
    ids.push_back(vocab.encode(tokens[i]));
  }
  ids.push_back(kEos);
  if (pad) ids.resize(max_len, kPad);
  return ids;
}

std::vector<std::string> decode_sequence(const std::vector<TokenId>& ids, const Vocab& vocab) {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == kPad || id == kBos || id == kEos) continue;
    out.push_back(vocab.decode(id));
  }
  return out;
}

}  // namespace api2com::corpus
