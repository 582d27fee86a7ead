#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "api2com/harness/experiment.hpp"
#include "api2com/harness/pipeline.hpp"
#include "api2com/harness/split.hpp"
#include "api2com/util/jsonl.hpp"

using namespace api2com;
using namespace api2com::harness;
namespace fs = std::filesystem;
using Strings = std::vector<std::string>;

namespace {

const fs::path kData = API2COM_TEST_DATA;

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("api2com_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the preprocessing chain on the fixture corpus once per process.
const fs::path& attached_fixture() {
  static const fs::path out = [] {
    const auto dir = fresh_dir("pipeline");
    preprocess(kData / "fixture_corpus.jsonl", dir / "pre.jsonl", corpus::FilterRules{});
    extract_apis(dir / "pre.jsonl", dir / "ext.jsonl");
    build_kb_file(kData / "kb50.tsv", dir / "kb.json");
    attach_docs(apikb::ApiDocKb::load(dir / "kb.json"), dir / "ext.jsonl", dir / "att.jsonl");
    return dir / "att.jsonl";
  }();
  return out;
}

metrics::MetricReport report(std::array<double, 4> bleu, double meteor, double rouge) {
  metrics::MetricReport r;
  r.bleu = {bleu[0], bleu[1], bleu[2], bleu[3]};
  r.meteor = meteor;
  r.rouge_l = rouge;
  return r;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec s;
  s.corpus = attached_fixture();
  s.out_dir = out;
  s.seed = 4;
  s.variants = {{nnet::Variant::Base, nnet::Cell::Transformer}, {nnet::Variant::Api, nnet::Cell::Transformer}};
  s.per_stratum_models = false;
  s.model.layers = 1;
  s.model.heads = 2;
  s.model.d_model = 8;
  s.model.d_ff = 16;
  s.model.max_epochs = 2;
  s.model.batch_size = 8;
  s.model.min_count = 1;
  s.model.dropout = 0;
  return s;
}

}  // namespace

TEST(Split, SizesAndPartition) {
  const auto s = split_indices(100, 7);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.valid.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.valid.begin(), s.valid.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 100u);
  EXPECT_EQ(*all.rbegin(), 99u);
}

TEST(Split, FloorsAndDeterminism) {
  for (std::size_t n : {10u, 11u, 19u, 37u, 1000u}) {
    const auto s = split_indices(n, 3);
    EXPECT_EQ(s.valid.size(), n / 10);
    EXPECT_EQ(s.test.size(), n / 10);
    EXPECT_EQ(s.train.size() + s.valid.size() + s.test.size(), n);
    const auto again = split_indices(n, 3);
    EXPECT_EQ(s.train, again.train);
    EXPECT_EQ(s.test, again.test);
  }
  EXPECT_NE(split_indices(100, 1).test, split_indices(100, 2).test);
  EXPECT_THROW(split_indices(9, 1), std::invalid_argument);
  const auto d = split_dataset(std::vector<int>(20, 5), 1);
  EXPECT_EQ(d.train.size(), 16u);
}

TEST(Stratify, LabelsAndPartition) {
  EXPECT_EQ(label(stratum_for(0)), "0 APIs");
  EXPECT_EQ(label(stratum_for(1)), "1 API");
  EXPECT_EQ(label(stratum_for(3)), "3 APIs");
  EXPECT_EQ(label(stratum_for(4)), ">=4 APIs");
  EXPECT_EQ(stratum_for(17), Stratum::FourPlus);
  const std::vector<std::size_t> counts{0, 1, 5, 2, 2, 3, 4, 1, 0, 9};
  const auto s = stratify_by_api_count(counts);
  EXPECT_EQ(s.total(), counts.size());
  EXPECT_EQ(s[Stratum::Two], (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(s[Stratum::FourPlus], (std::vector<std::size_t>{2, 6, 9}));
  for (std::size_t k = 0; k < 5; ++k) {
    for (auto i : s.members[k]) EXPECT_EQ(stratum_for(counts[i]), static_cast<Stratum>(k));
  }
}

TEST(Stratify, MeanDocLengthSkipsSeparators) {
  const Strata s = stratify_by_api_count({1, 2, 2});
  const std::vector<Strings> docs{{"a", "b"}, {"a", "<sep>", "b", "c"}, {"x", "<sep>", "y"}};
  const auto m = mean_doc_lengths(s, docs);
  EXPECT_DOUBLE_EQ(m[1], 2.0);
  EXPECT_DOUBLE_EQ(m[2], 2.5);
  EXPECT_DOUBLE_EQ(m[3], 0.0);
}

TEST(Stratify, ConsecutiveRepeatsCountOnce) {
  const auto kb = apikb::build_kb({{"f", 0, "a.A", "Does f."}, {"g", 1, "a.A", "Does g."}}).kb;
  EXPECT_EQ(resolvable_api_count(kb, {{"f", 0, 0}, {"f", 0, 1}, {"h", 0, 2}, {"g", 1, 3}, {"f", 0, 4}}), 3u);
  EXPECT_EQ(resolvable_api_count(kb, {{"h", 0, 0}}), 0u);
}

TEST(Stratify, FixtureDocLengthGrowsWithApiCount) {
  const auto lines = util::read_jsonl(attached_fixture());
  ASSERT_TRUE(lines.errors.empty());
  std::vector<std::size_t> counts;
  std::vector<Strings> docs;
  for (const auto& j : lines.objects) {
    counts.push_back(j.at("api_count").get<std::size_t>());
    docs.push_back(j.at("doc_tokens").get<Strings>());
    if (counts.back() == 0) EXPECT_TRUE(docs.back().empty()) << j.at("id");
    if (counts.back() > 0) {
      EXPECT_EQ(static_cast<std::size_t>(std::count(docs.back().begin(), docs.back().end(), "<sep>")),
                counts.back() - 1)
          << j.at("id");
    }
  }
  const auto s = stratify_by_api_count(counts);
  const auto m = mean_doc_lengths(s, docs);
  double prev = 0;
  for (Stratum k : kReportedStrata) {
    if (s[k].empty()) continue;
    EXPECT_GT(m[static_cast<std::size_t>(k)], prev) << label(k);
    prev = m[static_cast<std::size_t>(k)];
  }
}

TEST(LowFreq, BucketsAndLabels) {
  EXPECT_EQ(bucket_label(0), "<50");
  EXPECT_EQ(bucket_label(4), "200-300");
  EXPECT_EQ(bucket_of(0), 0u);
  EXPECT_EQ(bucket_of(49), 0u);
  EXPECT_EQ(bucket_of(50), 1u);
  EXPECT_EQ(bucket_of(299), 4u);
  EXPECT_EQ(bucket_of(499), 6u);
  EXPECT_FALSE(bucket_of(500));
}

TEST(LowFreq, ClippedCounting) {
  const std::map<std::string, std::size_t, std::less<>> freq{{"a", 10}, {"b", 120}, {"c", 900}};
  auto f = [&](std::string_view t) {
    auto it = freq.find(t);
    return it == freq.end() ? std::size_t{0} : it->second;
  };
  const auto c = low_frequency_analysis({{{"a", "b", "c", "a"}, {"a", "a", "a", "b", "z", "c"}}}, f);
  EXPECT_EQ(c.reference[0], 2u);  // a, a
  EXPECT_EQ(c.reference[2], 1u);  // b
  EXPECT_EQ(c.hypothesis[0], 2u);  // third a is clipped, z is not in the reference
  EXPECT_EQ(c.hypothesis[2], 1u);
  for (std::size_t b = 0; b < 7; ++b) EXPECT_LE(c.hypothesis[b], c.reference[b]);
}

TEST(Improvement, PercentOverBaseWithNaN) {
  const auto base = report({10, 20, 0, 40}, 50, 25);
  const auto other = report({15, 10, 5, 40}, 55, 50);
  const auto imp = improvement(base, other);
  EXPECT_DOUBLE_EQ(imp[0], 50);
  EXPECT_DOUBLE_EQ(imp[1], -50);
  EXPECT_TRUE(std::isnan(imp[2]));
  EXPECT_DOUBLE_EQ(imp[3], 0);
  EXPECT_DOUBLE_EQ(imp[4], 10);
  EXPECT_DOUBLE_EQ(imp[5], 100);
  EXPECT_TRUE(std::isnan(imp[6]));
  const auto fine = improvement(report({10, 10, 10, 10}, 10, 10), report({20, 20, 20, 20}, 20, 5));
  EXPECT_DOUBLE_EQ(fine[6], (100.0 * 5 - 50) / 6);
}

TEST(ExperimentSpec, TomlParsing) {
  const auto dir = fresh_dir("spec");
  std::ofstream(dir / "exp.toml") << "corpus = \"data/all.jsonl\"\nout_dir = \"out\"\nseed = 9\n"
                                     "variants = [\"base\", \"gru:api\", \"full\"]\nper_stratum_models = false\n"
                                     "[model]\nd_model = 32\nheads = 2\nmax_epochs = 3\n";
  const auto s = ExperimentSpec::from_toml_file(dir / "exp.toml");
  EXPECT_EQ(*s.corpus, dir / "data/all.jsonl");
  EXPECT_EQ(s.out_dir, dir / "out");
  EXPECT_EQ(s.seed, 9u);
  EXPECT_FALSE(s.per_stratum_models);
  ASSERT_EQ(s.variants.size(), 3u);
  EXPECT_EQ(s.variants[1].cell, nnet::Cell::Gru);
  EXPECT_EQ(s.variants[1].variant, nnet::Variant::Api);
  EXPECT_EQ(s.variants[1].name(), "gru_api");
  EXPECT_EQ(s.variants[2].name(), "transformer_full");
  EXPECT_EQ(s.model.d_ff, 128);
  EXPECT_EQ(s.model.max_epochs, 3);
}

TEST(ExperimentSpec, ValidationErrors) {
  const auto dir = fresh_dir("spec_bad");
  auto bad = [&](const std::string& text) {
    std::ofstream(dir / "bad.toml") << text;
    EXPECT_THROW(ExperimentSpec::from_toml_file(dir / "bad.toml"), std::invalid_argument) << text;
  };
  bad("out_dir = \"o\"\nvariants = [\"base\"]\n");
  bad("corpus = \"c\"\ntrain = \"t\"\nout_dir = \"o\"\nvariants = [\"base\"]\n");
  bad("corpus = \"c\"\nout_dir = \"o\"\nvariants = []\n");
  bad("corpus = \"c\"\nvariants = [\"base\"]\n");
  bad("corpus = \"c\"\nout_dir = \"o\"\nvariants = [\"sideways\"]\n");
  bad("corpus = \"c\"\nout_dir = \"o\"\nvariants = [1]\n");
  bad("corpus = \"c\"\nout_dir = \"o\"\nvariants = [\"base\"]\n[model]\nheads = 5\nd_model = 8\n");
  bad("corpus = ");
}

TEST(Experiment, DeterministicOutputs) {
  const auto a = run_experiment(small_spec(fresh_dir("run_a")));
  const auto b = run_experiment(small_spec(fresh_dir("run_b")));
  ASSERT_EQ(a.variants.size(), 2u);
  for (const auto& v : a.variants) EXPECT_TRUE(v.ok) << v.error;
  EXPECT_EQ(a.manifest.at("files"), b.manifest.at("files"));
  EXPECT_EQ(a.manifest.at("splits").at("test"), a.test_size);
  std::size_t total = 0;
  for (auto n : a.test_strata_sizes) total += n;
  EXPECT_EQ(total, a.test_size);
  for (const auto& f : a.manifest.at("files")) {
    EXPECT_TRUE(fs::exists(fs::temp_directory_path() / "api2com_harness_run_a" / f.at("path").get<std::string>()));
  }
}

TEST(Experiment, FailingVariantIsRecorded) {
  auto spec = small_spec(fresh_dir("run_fail"));
  spec.model.lr0 = 1e300;
  std::vector<std::string> log;
  const auto r = run_experiment(spec, [&](const std::string& m) { log.push_back(m); });
  ASSERT_EQ(r.variants.size(), 2u);
  for (const auto& v : r.variants) {
    EXPECT_FALSE(v.ok);
    EXPECT_FALSE(v.error.empty());
  }
  for (const auto& v : r.manifest.at("variants")) EXPECT_EQ(v.at("status"), "failed");
  EXPECT_TRUE(fs::exists(spec.out_dir / "manifest.json"));
  EXPECT_TRUE(std::any_of(log.begin(), log.end(), [](const std::string& m) { return m.find("failed") != std::string::npos; }));
}
