#include "api2com/harness/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <toml.hpp>

#include "api2com/corpus/tokenize.hpp"
#include "api2com/harness/split.hpp"
#include "api2com/nnet/dataset.hpp"
#include "api2com/nnet/model.hpp"
#include "api2com/nnet/trainer.hpp"
#include "api2com/util/hash.hpp"
#include "api2com/util/jsonl.hpp"

namespace api2com::harness {

using nlohmann::json;

std::string VariantSpec::name() const { return nnet::to_string(cell) + "_" + nnet::to_string(variant); }

namespace {

VariantSpec parse_variant(const std::string& s) {
  VariantSpec v;
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    v.variant = nnet::variant_from_string(s);
  } else {
    v.cell = nnet::cell_from_string(s.substr(0, colon));
    v.variant = nnet::variant_from_string(s.substr(colon + 1));
  }
  return v;
}

json toml_scalars(const toml::table& t) {
  json j = json::object();
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (node.is_integer()) {
      j[key] = *node.value<std::int64_t>();
    } else if (node.is_floating_point()) {
      j[key] = *node.value<double>();
    } else if (node.is_string()) {
      j[key] = *node.value<std::string>();
    } else if (node.is_boolean()) {
      j[key] = *node.value<bool>();
    }
  }
  return j;
}

struct Data {
  std::vector<nnet::SourceRecord> records;
  std::vector<std::size_t> api_counts;
};

Data load_data(const fs::path& path) {
  auto lines = util::read_jsonl(path);
  if (!lines.errors.empty()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(lines.errors[0].first) + ": " +
                             lines.errors[0].second);
  }
  Data d;
  for (const auto& j : lines.objects) {
    d.records.push_back(nnet::record_from_json(j));
    d.api_counts.push_back(j.value("api_count", std::size_t{0}));
  }
  return d;
}

Data subset(const Data& d, const std::vector<std::size_t>& idx) {
  Data s;
  for (auto i : idx) {
    s.records.push_back(d.records[i]);
    s.api_counts.push_back(d.api_counts[i]);
  }
  return s;
}

struct Fitted {
  nnet::Vocabs vocabs;
  std::unique_ptr<nnet::Model> model;
  json training;
};

Fitted fit(const nnet::ModelConfig& cfg, const std::vector<nnet::SourceRecord>& train,
           const std::vector<nnet::SourceRecord>& valid) {
  Fitted f;
  f.vocabs = nnet::build_vocabs(train, cfg);
  f.model = std::make_unique<nnet::Model>(cfg, f.vocabs.sizes());
  const auto tr = nnet::encode_all(train, f.vocabs, cfg);
  const auto va = nnet::encode_all(valid, f.vocabs, cfg);
  const auto result = nnet::train(*f.model, tr, va);
  f.training = {{"epochs", result.history.size()},
                {"best_epoch", result.best_epoch},
                {"best_valid_loss", result.best_valid_loss},
                {"stop_reason", result.stop_reason},
                {"train_size", train.size()},
                {"valid_size", valid.size()}};
  return f;
}

std::vector<std::vector<std::string>> decode_all(const Fitted& f, const std::vector<nnet::SourceRecord>& test,
                                                 const nnet::ModelConfig& cfg) {
  std::vector<std::vector<std::string>> out;
  out.reserve(test.size());
  for (const auto& r : test) {
    const auto ex = nnet::encode_example(r, f.vocabs, cfg);
    out.push_back(corpus::decode_sequence(f.model->greedy_decode(ex, cfg.decode_max_len), f.vocabs.comment));
  }
  return out;
}

std::vector<metrics::EvalPair> pairs_for(const std::vector<nnet::SourceRecord>& test,
                                         const std::vector<std::vector<std::string>>& hyps) {
  std::vector<metrics::EvalPair> pairs;
  pairs.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) pairs.push_back({test[i].comment_tokens, hyps[i]});
  return pairs;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

json lowfreq_json(const LowFreqCounts& c) {
  json j = json::object();
  for (std::size_t b = 0; b < kFreqBuckets.size(); ++b) {
    j[bucket_label(b)] = {{"hypothesis", c.hypothesis[b]}, {"reference", c.reference[b]}};
  }
  return j;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_toml_file(const fs::path& path) {
  toml::table t;
  try {
    t = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw std::invalid_argument("spec " + path.string() + ": " + std::string(e.description()));
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  ExperimentSpec s;
  if (auto v = t["corpus"].value<std::string>()) s.corpus = resolve(*v);
  if (auto v = t["train"].value<std::string>()) s.train = resolve(*v);
  if (auto v = t["valid"].value<std::string>()) s.valid = resolve(*v);
  if (auto v = t["test"].value<std::string>()) s.test = resolve(*v);
  if (auto v = t["out_dir"].value<std::string>()) s.out_dir = resolve(*v);
  if (auto v = t["seed"].value<std::int64_t>()) s.seed = static_cast<std::uint64_t>(*v);
  if (auto v = t["per_stratum_models"].value<bool>()) s.per_stratum_models = *v;
  if (auto arr = t["variants"].as_array()) {
    for (const auto& e : *arr) {
      auto name = e.value<std::string>();
      if (!name) throw std::invalid_argument("spec: variants must be strings");
      s.variants.push_back(parse_variant(*name));
    }
  }
  if (auto m = t["model"].as_table()) {
    json j = toml_scalars(*m);
    if (j.contains("d_model") && !j.contains("d_ff")) j["d_ff"] = 4 * j.at("d_model").get<int>();
    s.model = nnet::ModelConfig::from_json(j);
  }
  s.validate();
  return s;
}

void ExperimentSpec::validate() const {
  const bool split = train || valid || test;
  if (corpus && split) throw std::invalid_argument("spec: give either corpus or train/valid/test, not both");
  if (!corpus && !(train && valid && test)) throw std::invalid_argument("spec: corpus or train/valid/test required");
  if (variants.empty()) throw std::invalid_argument("spec: no variants");
  if (out_dir.empty()) throw std::invalid_argument("spec: out_dir required");
  model.validate();
}

std::array<double, 7> improvement(const metrics::MetricReport& base, const metrics::MetricReport& other) {
  const std::array<double, 6> b = {base.bleu.at(0), base.bleu.at(1), base.bleu.at(2),
                                   base.bleu.at(3), base.meteor,     base.rouge_l};
  const std::array<double, 6> o = {other.bleu.at(0), other.bleu.at(1), other.bleu.at(2),
                                   other.bleu.at(3), other.meteor,     other.rouge_l};
  std::array<double, 7> out{};
  double sum = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    out[i] = b[i] == 0 ? std::numeric_limits<double>::quiet_NaN() : 100.0 * (o[i] - b[i]) / b[i];
    sum += out[i];
  }
  out[6] = sum / 6.0;
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const Logger& log) {
  spec.validate();
  auto say = [&](const std::string& m) {
    if (log) log(m);
  };
  Data train, valid, test;
  if (spec.corpus) {
    const Data all = load_data(*spec.corpus);
    const auto idx = split_indices(all.records.size(), spec.seed);
    train = subset(all, idx.train);
    valid = subset(all, idx.valid);
    test = subset(all, idx.test);
  } else {
    train = load_data(*spec.train);
    valid = load_data(*spec.valid);
    test = load_data(*spec.test);
  }
  fs::create_directories(spec.out_dir);

  ExperimentResult result;
  result.test_size = test.records.size();
  const Strata test_strata = stratify_by_api_count(test.api_counts);
  const Strata train_strata = stratify_by_api_count(train.api_counts);
  const Strata valid_strata = stratify_by_api_count(valid.api_counts);
  for (std::size_t k = 0; k < 5; ++k) result.test_strata_sizes[k] = test_strata.members[k].size();
  std::vector<std::vector<std::string>> test_docs;
  for (const auto& r : test.records) test_docs.push_back(r.doc_tokens);
  const auto doc_lens = mean_doc_lengths(test_strata, test_docs);

  std::vector<std::string> written;
  json manifest_variants = json::array();

  for (const auto& vs : spec.variants) {
    VariantResult vr;
    vr.spec = vs;
    nnet::ModelConfig cfg = spec.model;
    cfg.variant = vs.variant;
    cfg.cell = vs.cell;
    cfg.seed = spec.seed;
    const std::string name = vs.name();
    try {
      say("[" + name + "] training on " + std::to_string(train.records.size()) + " records");
      const Fitted f = fit(cfg, train.records, valid.records);
      vr.training = f.training;
      const auto hyps = decode_all(f, test.records, cfg);
      const auto pairs = pairs_for(test.records, hyps);
      vr.overall = metrics::evaluate(pairs);
      vr.lowfreq = low_frequency_analysis(pairs, [&](std::string_view t) { return f.vocabs.comment.frequency(t); });
      say("[" + name + "] test BLEU-4 " + fmt(vr.overall.bleu[3]) + ", smoothed BLEU " + fmt(vr.overall.smoothed_bleu));

      for (Stratum s : kReportedStrata) {
        StratumResult sr;
        sr.stratum = s;
        const auto& members = test_strata[s];
        sr.n_test = members.size();
        sr.mean_doc_len = doc_lens[static_cast<std::size_t>(s)];
        if (members.empty()) {
          sr.note = "no test records";
        } else if (!spec.per_stratum_models) {
          std::vector<metrics::EvalPair> sub;
          for (auto i : members) sub.push_back(pairs[i]);
          sr.report = metrics::evaluate(sub);
        } else if (train_strata[s].empty()) {
          sr.note = "no training records";
        } else {
          const Data tr = subset(train, train_strata[s]);
          Data va = subset(valid, valid_strata[s]);
          if (va.records.empty()) {
            va = tr;
            sr.note = "no validation records; selected on training loss";
          }
          const Data te = subset(test, members);
          say("[" + name + "] stratum " + label(s) + ": " + std::to_string(tr.records.size()) + " train, " +
              std::to_string(te.records.size()) + " test");
          const Fitted fs_model = fit(cfg, tr.records, va.records);
          sr.report = metrics::evaluate(pairs_for(te.records, decode_all(fs_model, te.records, cfg)));
        }
        vr.strata.push_back(std::move(sr));
      }

      std::ostringstream hyp_text;
      for (const auto& h : hyps) hyp_text << corpus::join_tokens(h) << '\n';
      const std::string hyp_file = "hyps_" + name + ".txt";
      util::write_text(spec.out_dir / hyp_file, hyp_text.str());
      written.push_back(hyp_file);

      json rep;
      rep["variant"] = nnet::to_string(vs.variant);
      rep["cell"] = nnet::to_string(vs.cell);
      rep["seed"] = spec.seed;
      rep["config"] = cfg.to_json();
      rep["overall"] = vr.overall.to_json();
      rep["training"] = vr.training;
      rep["per_stratum_models"] = spec.per_stratum_models;
      rep["strata"] = json::array();
      for (const auto& sr : vr.strata) {
        json js = {{"stratum", label(sr.stratum)}, {"n_test", sr.n_test}, {"mean_doc_len", sr.mean_doc_len}};
        js["report"] = sr.report ? sr.report->to_json() : json(nullptr);
        if (!sr.note.empty()) js["note"] = sr.note;
        rep["strata"].push_back(js);
      }
      rep["lowfreq"] = lowfreq_json(vr.lowfreq);
      rep["hypotheses"] = hyp_file;
      const std::string rep_file = "report_" + name + ".json";
      util::write_text(spec.out_dir / rep_file, rep.dump(2) + "\n");
      written.push_back(rep_file);
      vr.ok = true;
      manifest_variants.push_back({{"name", name}, {"status", "ok"}});
    } catch (const std::exception& e) {
      vr.ok = false;
      vr.error = e.what();
      say("[" + name + "] failed: " + vr.error);
      manifest_variants.push_back({{"name", name}, {"status", "failed"}, {"error", vr.error}});
    }
    result.variants.push_back(std::move(vr));
  }

  // strata.tsv: one row per (variant, stratum); improvement columns compare
  // against the Base variant of the same cell.
  std::ostringstream st;
  st << "stratum\tn_test\tmean_doc_len\tvariant\tbleu_1\tbleu_2\tbleu_3\tbleu_4\tsmoothed_bleu\tmeteor\trouge_l";
  for (const auto* c : kImprovementColumns) st << "\timp_" << c;
  st << '\n';
  for (Stratum s : kReportedStrata) {
    for (const auto& vr : result.variants) {
      if (!vr.ok) continue;
      const StratumResult* sr = nullptr;
      for (const auto& x : vr.strata) {
        if (x.stratum == s) sr = &x;
      }
      if (!sr) continue;
      st << label(s) << '\t' << sr->n_test << '\t' << fmt(sr->mean_doc_len) << '\t' << vr.spec.name();
      if (sr->report) {
        const auto& r = *sr->report;
        for (double b : r.bleu) st << '\t' << fmt(b);
        st << '\t' << fmt(r.smoothed_bleu) << '\t' << fmt(r.meteor) << '\t' << fmt(r.rouge_l);
      } else {
        for (int i = 0; i < 7; ++i) st << "\tNA";
      }
      const StratumResult* base = nullptr;
      for (const auto& other : result.variants) {
        if (other.ok && other.spec.cell == vr.spec.cell && other.spec.variant == nnet::Variant::Base) {
          for (const auto& x : other.strata) {
            if (x.stratum == s) base = &x;
          }
        }
      }
      if (vr.spec.variant != nnet::Variant::Base && base && base->report && sr->report) {
        for (double v : improvement(*base->report, *sr->report)) st << '\t' << fmt(v);
      } else {
        for (std::size_t i = 0; i < kImprovementColumns.size(); ++i) st << "\tNA";
      }
      st << '\n';
    }
  }
  util::write_text(spec.out_dir / "strata.tsv", st.str());
  written.push_back("strata.tsv");

  std::ostringstream lf;
  lf << "variant\tsource";
  for (std::size_t b = 0; b < kFreqBuckets.size(); ++b) lf << '\t' << bucket_label(b);
  lf << '\n';
  for (const auto& vr : result.variants) {
    if (!vr.ok) continue;
    lf << vr.spec.name() << "\thypothesis";
    for (auto n : vr.lowfreq.hypothesis) lf << '\t' << n;
    lf << '\n' << vr.spec.name() << "\treference";
    for (auto n : vr.lowfreq.reference) lf << '\t' << n;
    lf << '\n';
  }
  util::write_text(spec.out_dir / "lowfreq.tsv", lf.str());
  written.push_back("lowfreq.tsv");

  json manifest;
  manifest["seed"] = spec.seed;
  manifest["splits"] = {{"train", train.records.size()}, {"valid", valid.records.size()}, {"test", test.records.size()}};
  manifest["test_strata"] = json::object();
  for (std::size_t k = 0; k < 5; ++k) manifest["test_strata"][label(static_cast<Stratum>(k))] = result.test_strata_sizes[k];
  manifest["variants"] = manifest_variants;
  manifest["files"] = json::array();
  for (const auto& f : written) {
    manifest["files"].push_back({{"path", f}, {"sha256", util::sha256_file(spec.out_dir / f)}});
  }
  util::write_text(spec.out_dir / "manifest.json", manifest.dump(2) + "\n");
  result.manifest = manifest;
  return result;
}

}  // namespace api2com::harness
