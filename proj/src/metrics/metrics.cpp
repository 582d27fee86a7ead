#include "api2com/metrics/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "api2com/corpus/tokenize.hpp"

namespace api2com::metrics {

using nlohmann::json;

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Sentence& s, std::size_t n) {
  NgramCounts out;
  if (s.size() < n) return out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++out[Sentence(s.begin() + static_cast<std::ptrdiff_t>(i),
                   s.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

// Clipped matches and hypothesis total for order n.
std::pair<std::size_t, std::size_t> clipped(const EvalPair& p, std::size_t n) {
  const auto hyp = ngrams(p.hypothesis, n);
  const auto ref = ngrams(p.reference, n);
  std::size_t match = 0, total = 0;
  for (const auto& [g, c] : hyp) {
    total += c;
    auto it = ref.find(g);
    if (it != ref.end()) match += std::min(c, it->second);
  }
  return {match, total};
}

void require_reference(const EvalPair& p) {
  if (p.reference.empty()) throw std::invalid_argument("empty reference");
}

double brevity_penalty(double ref_len, double hyp_len) {
  if (hyp_len <= 0) return 0.0;
  return std::min(1.0, std::exp(1.0 - ref_len / hyp_len));
}

// Memoized search over hypothesis positions. State: position, used
// reference positions, reference index aligned to the previous position.
class ChunkSearch {
 public:
  static constexpr std::size_t kStateBudget = 2'000'000;

  ChunkSearch(const Sentence& ref, const Sentence& hyp) : ref_(ref), hyp_(hyp) {
    std::map<std::string, std::size_t> ref_count, hyp_count;
    for (std::size_t j = 0; j < ref.size(); ++j) {
      word_mask_[ref[j]] |= std::uint64_t{1} << j;
      ++ref_count[ref[j]];
    }
    for (const auto& w : hyp) ++hyp_count[w];
    for (const auto& [w, c] : hyp_count) {
      auto it = ref_count.find(w);
      if (it != ref_count.end()) target_[w] = std::min(c, it->second);
    }
    remaining_after_.assign(hyp.size(), 0);
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = hyp.size(); i-- > 0;) {
      remaining_after_[i] = seen[hyp[i]];
      ++seen[hyp[i]];
    }
  }

  std::size_t matches() const {
    std::size_t m = 0;
    for (const auto& [w, t] : target_) m += t;
    return m;
  }

  // Minimum chunk count, or nullopt when the state budget runs out.
  std::optional<std::size_t> solve() {
    try {
      return best(0, 0, -1);
    } catch (const BudgetExceeded&) {
      return std::nullopt;
    }
  }

 private:
  struct BudgetExceeded {};
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;

  struct Key {
    std::size_t i;
    std::uint64_t mask;
    int prev;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = std::hash<std::uint64_t>{}(k.mask);
      h ^= (k.i * 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2);
      h ^= (static_cast<std::size_t>(k.prev + 1) * 0xbf58476d1ce4e5b9ULL) + (h << 6) + (h >> 2);
      return h;
    }
  };

  std::size_t best(std::size_t i, std::uint64_t mask, int prev) {
    if (i == hyp_.size()) return 0;
    const Key key{i, mask, prev};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (memo_.size() >= kStateBudget) throw BudgetExceeded{};

    const auto& w = hyp_[i];
    std::size_t result = kInf;
    auto t = target_.find(w);
    if (t == target_.end()) {
      result = best(i + 1, mask, -1);
    } else {
      const std::uint64_t refs = word_mask_.at(w);
      const auto matched = static_cast<std::size_t>(std::popcount(mask & refs));
      if (matched + remaining_after_[i] >= t->second) result = best(i + 1, mask, -1);
      if (matched < t->second) {
        for (std::uint64_t free = refs & ~mask; free; free &= free - 1) {
          const int j = std::countr_zero(free);
          const std::size_t cost = (prev >= 0 && j == prev + 1) ? 0 : 1;
          const std::size_t sub = best(i + 1, mask | (std::uint64_t{1} << j), j);
          if (sub < kInf) result = std::min(result, sub + cost);
        }
      }
    }
    memo_.emplace(key, result);
    return result;
  }

  const Sentence& ref_;
  const Sentence& hyp_;
  std::map<std::string, std::uint64_t> word_mask_;
  std::map<std::string, std::size_t> target_;
  std::vector<std::size_t> remaining_after_;
  std::unordered_map<Key, std::size_t, KeyHash> memo_;
};

// Left-to-right alignment preferring to extend the current chunk.
Alignment greedy_align(const Sentence& ref, const Sentence& hyp) {
  std::vector<bool> used(ref.size(), false);
  Alignment a;
  long prev = -1;
  for (const auto& w : hyp) {
    long pick = -1;
    if (prev >= 0 && static_cast<std::size_t>(prev + 1) < ref.size() &&
        !used[static_cast<std::size_t>(prev + 1)] && ref[static_cast<std::size_t>(prev + 1)] == w) {
      pick = prev + 1;
    } else {
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && ref[j] == w) {
          pick = static_cast<long>(j);
          break;
        }
      }
    }
    if (pick < 0) {
      prev = -1;
      continue;
    }
    used[static_cast<std::size_t>(pick)] = true;
    ++a.matches;
    if (!(prev >= 0 && pick == prev + 1)) ++a.chunks;
    prev = pick;
  }
  return a;
}

}  // namespace

json MetricReport::to_json() const {
  json j;
  for (std::size_t n = 0; n < bleu.size(); ++n) j["bleu_" + std::to_string(n + 1)] = bleu[n];
  j["smoothed_bleu"] = smoothed_bleu;
  j["meteor"] = meteor;
  j["rouge_l"] = rouge_l;
  j["n_pairs"] = n_pairs;
  return j;
}

MetricReport MetricReport::from_json(const json& j) {
  MetricReport r;
  for (std::size_t n = 1; j.contains("bleu_" + std::to_string(n)); ++n) {
    r.bleu.push_back(j.at("bleu_" + std::to_string(n)).get<double>());
  }
  r.smoothed_bleu = j.at("smoothed_bleu").get<double>();
  r.meteor = j.at("meteor").get<double>();
  r.rouge_l = j.at("rouge_l").get<double>();
  r.n_pairs = j.at("n_pairs").get<std::size_t>();
  return r;
}

std::vector<double> bleu_corpus(const std::vector<EvalPair>& pairs, std::size_t max_n) {
  if (pairs.empty()) throw std::invalid_argument("BLEU of an empty corpus");
  std::vector<std::size_t> match(max_n, 0), total(max_n, 0);
  double ref_len = 0, hyp_len = 0;
  for (const auto& p : pairs) {
    require_reference(p);
    ref_len += static_cast<double>(p.reference.size());
    hyp_len += static_cast<double>(p.hypothesis.size());
    for (std::size_t n = 1; n <= max_n; ++n) {
      auto [m, t] = clipped(p, n);
      match[n - 1] += m;
      total[n - 1] += t;
    }
  }
  const double bp = brevity_penalty(ref_len, hyp_len);
  std::vector<double> out(max_n, 0.0);
  double log_sum = 0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    if (match[n - 1] == 0) zero = true;
    if (!zero) {
      log_sum += std::log(static_cast<double>(match[n - 1]) / static_cast<double>(total[n - 1]));
    }
    out[n - 1] = zero ? 0.0 : 100.0 * bp * std::exp(log_sum / static_cast<double>(n));
  }
  return out;
}

double smoothed_bleu(const EvalPair& pair) {
  require_reference(pair);
  if (pair.hypothesis.empty()) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto [m, t] = clipped(pair, n);
    double p;
    if (n == 1) {
      if (m == 0) return 0.0;
      p = static_cast<double>(m) / static_cast<double>(t);
    } else {
      p = (static_cast<double>(m) + 1.0) / (static_cast<double>(t) + 1.0);
    }
    log_sum += std::log(p);
  }
  const double bp = brevity_penalty(static_cast<double>(pair.reference.size()),
                                    static_cast<double>(pair.hypothesis.size()));
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

std::size_t lcs_length(const Sentence& a, const Sentence& b) {
  std::vector<std::size_t> row(b.size() + 1, 0), prev(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
    std::swap(row, prev);
  }
  return prev[b.size()];
}

double rouge_l(const EvalPair& pair, double beta) {
  require_reference(pair);
  if (pair.hypothesis.empty()) return 0.0;
  const auto l = static_cast<double>(lcs_length(pair.reference, pair.hypothesis));
  if (l == 0) return 0.0;
  const double r = l / static_cast<double>(pair.reference.size());
  const double p = l / static_cast<double>(pair.hypothesis.size());
  const double b2 = beta * beta;
  return 100.0 * (1 + b2) * r * p / (r + b2 * p);
}

Alignment meteor_align(const Sentence& reference, const Sentence& hypothesis) {
  if (reference.size() > 64) return greedy_align(reference, hypothesis);
  ChunkSearch search(reference, hypothesis);
  const std::size_t m = search.matches();
  if (m == 0) return {};
  if (auto chunks = search.solve()) return {m, *chunks};
  return greedy_align(reference, hypothesis);
}

double meteor(const EvalPair& pair, const MeteorParams& params) {
  require_reference(pair);
  const auto a = meteor_align(pair.reference, pair.hypothesis);
  if (a.matches == 0) return 0.0;
  const auto m = static_cast<double>(a.matches);
  const double p = m / static_cast<double>(pair.hypothesis.size());
  const double r = m / static_cast<double>(pair.reference.size());
  const double f = p * r / (params.alpha * p + (1 - params.alpha) * r);
  const double penalty = params.gamma * std::pow(static_cast<double>(a.chunks) / m, params.theta);
  return 100.0 * f * (1 - penalty);
}

MetricReport evaluate(const std::vector<EvalPair>& pairs, double rouge_beta) {
  MetricReport rep;
  rep.bleu = bleu_corpus(pairs);
  rep.n_pairs = pairs.size();
  for (const auto& p : pairs) {
    rep.smoothed_bleu += smoothed_bleu(p);
    rep.meteor += meteor(p);
    rep.rouge_l += rouge_l(p, rouge_beta);
  }
  const auto n = static_cast<double>(pairs.size());
  rep.smoothed_bleu /= n;
  rep.meteor /= n;
  rep.rouge_l /= n;
  return rep;
}

namespace {
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}
}  // namespace

MetricReport evaluate_files(const std::filesystem::path& refs, const std::filesystem::path& hyps,
                            double rouge_beta) {
  const auto ref_lines = read_lines(refs);
  const auto hyp_lines = read_lines(hyps);
  if (ref_lines.size() != hyp_lines.size()) {
    throw std::invalid_argument("line count mismatch: " + std::to_string(ref_lines.size()) +
                                " references vs " + std::to_string(hyp_lines.size()) +
                                " hypotheses");
  }
  std::vector<EvalPair> pairs;
  pairs.reserve(ref_lines.size());
  for (std::size_t i = 0; i < ref_lines.size(); ++i) {
    EvalPair p{corpus::tokenize(ref_lines[i], corpus::TokenizeMode::Comment),
               corpus::tokenize(hyp_lines[i], corpus::TokenizeMode::Comment)};
    if (p.reference.empty()) {
      throw std::invalid_argument("empty reference on line " + std::to_string(i + 1));
    }
    pairs.push_back(std::move(p));
  }
  return evaluate(pairs, rouge_beta);
}

}  // namespace api2com::metrics
