#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace api2com::metrics {

using Sentence = std::vector<std::string>;

/// Reference and hypothesis, already normalized. The reference must be
/// non-empty; the hypothesis may be empty.
struct EvalPair {
  Sentence reference;
  Sentence hypothesis;
};

/// All scores are percentages in [0, 100].
struct MetricReport {
  std::vector<double> bleu;  // BLEU-1..4, corpus level
  double smoothed_bleu = 0;  // mean sentence BLEU-4, add-one smoothed
  double meteor = 0;
  double rouge_l = 0;
  std::size_t n_pairs = 0;

  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
};

/// Cumulative corpus BLEU-1..max_n from corpus-summed clipped n-gram counts
/// and corpus-level brevity penalty. Throws on an empty corpus.
std::vector<double> bleu_corpus(const std::vector<EvalPair>& pairs, std::size_t max_n = 4);

/// Sentence BLEU-4; precisions for n > 1 use (matches + 1) / (total + 1).
double smoothed_bleu(const EvalPair& pair);

std::size_t lcs_length(const Sentence& a, const Sentence& b);

/// LCS F-measure, F = (1 + b^2) R P / (R + b^2 P).
double rouge_l(const EvalPair& pair, double beta = 1.0);

struct MeteorParams {
  double alpha = 0.9;
  double gamma = 0.5;
  double theta = 3.0;
};

struct Alignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
};

/// Exact-match unigram alignment with the most matches and, among those,
/// the fewest chunks.
Alignment meteor_align(const Sentence& reference, const Sentence& hypothesis);

double meteor(const EvalPair& pair, const MeteorParams& params = {});

/// All metrics over a corpus; sentence-level metrics are averaged.
MetricReport evaluate(const std::vector<EvalPair>& pairs, double rouge_beta = 1.0);

/// Line-aligned reference and hypothesis files, both tokenized in comment
/// mode. Throws on a line-count mismatch or an empty reference line.
MetricReport evaluate_files(const std::filesystem::path& refs, const std::filesystem::path& hyps,
                            double rouge_beta = 1.0);

}  // namespace api2com::metrics
