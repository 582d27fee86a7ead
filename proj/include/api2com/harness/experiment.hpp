#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "api2com/harness/lowfreq.hpp"
#include "api2com/harness/stratify.hpp"
#include "api2com/metrics/metrics.hpp"
#include "api2com/nnet/config.hpp"

namespace api2com::harness {

namespace fs = std::filesystem;

struct VariantSpec {
  nnet::Variant variant = nnet::Variant::Base;
  nnet::Cell cell = nnet::Cell::Transformer;

  std::string name() const;  // e.g. "transformer_api"
  bool operator==(const VariantSpec&) const = default;
};

struct ExperimentSpec {
  /// Either one corpus split 8/1/1 by seed, or explicit train/valid/test.
  /// Records carry tokens, flat_ast, doc_tokens and api_count.
  std::optional<fs::path> corpus;
  std::optional<fs::path> train, valid, test;
  std::vector<VariantSpec> variants;
  std::uint64_t seed = 1;
  fs::path out_dir;
  nnet::ModelConfig model;
  /// Train one model per API-count stratum; otherwise strata are cut from
  /// the decodes of the model trained on everything.
  bool per_stratum_models = true;

  /// Table keys: corpus | train+valid+test, out_dir, seed, variants
  /// (["base", "gru:api", ...]), per_stratum_models, [model]. Relative
  /// paths resolve against the spec file's directory.
  static ExperimentSpec from_toml_file(const fs::path& path);
  void validate() const;
};

/// Improvement of `other` over `base` per metric, in percent, for BLEU-1..4,
/// METEOR and ROUGE-L, followed by their mean. NaN where base is 0.
std::array<double, 7> improvement(const metrics::MetricReport& base, const metrics::MetricReport& other);
inline constexpr std::array<const char*, 7> kImprovementColumns = {"bleu_1", "bleu_2", "bleu_3", "bleu_4",
                                                                   "meteor", "rouge_l", "avg"};

struct StratumResult {
  Stratum stratum = Stratum::One;
  std::size_t n_test = 0;
  double mean_doc_len = 0;
  std::optional<metrics::MetricReport> report;  // absent when nothing to score
  std::string note;                              // why the report is absent
};

struct VariantResult {
  VariantSpec spec;
  bool ok = false;
  std::string error;
  metrics::MetricReport overall;
  std::vector<StratumResult> strata;
  LowFreqCounts lowfreq;
  nlohmann::json training;
};

struct ExperimentResult {
  std::vector<VariantResult> variants;
  std::array<std::size_t, 5> test_strata_sizes{};
  std::size_t test_size = 0;
  nlohmann::json manifest;
};

using Logger = std::function<void(const std::string&)>;

/// Trains, decodes and scores every variant, then writes report_<name>.json,
/// hyps_<name>.txt, strata.tsv, lowfreq.tsv and manifest.json (SHA-256 of
/// every other file) under out_dir. A failing variant is recorded in the
/// manifest and the rest still run.
ExperimentResult run_experiment(const ExperimentSpec& spec, const Logger& log = {});

}  // namespace api2com::harness
