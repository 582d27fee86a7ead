#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "api2com/corpus/corpus.hpp"

namespace api2com::corpus {

using TokenId = std::int32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kBos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr TokenId kFirstFreeId = 4;

/// Token <-> id map with the four reserved ids in front. Ids of retained
/// tokens are dense, ordered by train frequency (desc) then token text.
class Vocab {
 public:
  Vocab();

  TokenId encode(std::string_view token) const;
  /// Reserved ids decode to "<pad>", "unk", "<s>", "</s>".
  const std::string& decode(TokenId id) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return id_to_token_.size(); }

  /// Occurrences in the build corpus, including tokens cut by the thresholds.
  std::size_t frequency(std::string_view token) const;
  const std::map<std::string, std::size_t, std::less<>>& frequencies() const { return counts_; }

  /// TSV rows "token\tid\tcount" for every id, reserved ids included.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static Vocab load(std::istream& in);
  static Vocab load(const std::filesystem::path& path);

  /// SHA-256 of the saved TSV.
  std::string hash() const;

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  friend Vocab build_vocab(const std::vector<std::vector<std::string>>&, std::size_t, std::size_t,
                           const std::vector<std::string>&);
  void add(const std::string& token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::map<std::string, std::size_t, std::less<>> counts_;
};

enum class Side { Code, Comment };

/// Keeps tokens seen at least min_count times, at most max_size of them
/// (most frequent first, ties by text). Tokens in always_keep are retained
/// regardless of count and come first within max_size. Throws std::invalid_argument on an empty corpus.
Vocab build_vocab(const std::vector<std::vector<std::string>>& sequences, std::size_t min_count = 2,
                  std::size_t max_size = 30000, const std::vector<std::string>& always_keep = {});
Vocab build_vocab(const std::vector<MethodRecord>& records, Side side, std::size_t min_count = 2,
                  std::size_t max_size = 30000);

/// BOS + ids + EOS, cut to max_len with EOS kept last. With pad, PAD fills
/// the tail up to max_len.
std::vector<TokenId> encode_sequence(const std::vector<std::string>& tokens, const Vocab& vocab,
                                     std::size_t max_len, bool pad = true);

/// Drops PAD, BOS and EOS; UNK becomes "unk".
std::vector<std::string> decode_sequence(const std::vector<TokenId>& ids, const Vocab& vocab);

}  // namespace api2com::corpus
