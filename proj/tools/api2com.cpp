// Command-line driver for the comment-generation pipeline.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "api2com/apikb/kb.hpp"
#include "api2com/corpus/corpus.hpp"
#include "api2com/corpus/tokenize.hpp"
#include "api2com/harness/experiment.hpp"
#include "api2com/harness/pipeline.hpp"
#include "api2com/metrics/metrics.hpp"
#include "api2com/nnet/checkpoint.hpp"
#include "api2com/nnet/dataset.hpp"
#include "api2com/nnet/trainer.hpp"
#include "api2com/util/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace api2com;

namespace {

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_train(const fs::path& config_path, const fs::path& train_path, const fs::path& valid_path,
              const fs::path& out, bool quiet) {
  const auto cfg = nnet::ModelConfig::from_toml_file(config_path);
  const auto train = nnet::load_records(train_path);
  const auto valid = nnet::load_records(valid_path);
  const auto vocabs = nnet::build_vocabs(train, cfg);
  nnet::Model model(cfg, vocabs.sizes());
  nnet::TrainOptions opts;
  if (!quiet) {
    opts.on_epoch = [](const nnet::EpochStats& s) {
      std::cerr << "epoch " << s.epoch << "  lr " << s.lr << "  train " << s.train_loss << "  valid "
                << s.valid_loss << '\n';
    };
  }
  const auto result = nnet::train(model, nnet::encode_all(train, vocabs, cfg), nnet::encode_all(valid, vocabs, cfg), opts);
  nnet::save_checkpoint(out, model, vocabs, {result.best_valid_loss, result.best_epoch});
  json log = {{"best_epoch", result.best_epoch},
              {"best_valid_loss", result.best_valid_loss},
              {"stop_reason", result.stop_reason},
              {"history", json::array()}};
  for (const auto& h : result.history) {
    log["history"].push_back(
        {{"epoch", h.epoch}, {"lr", h.lr}, {"train_loss", h.train_loss}, {"valid_loss", h.valid_loss}});
  }
  util::write_text(out / "train_log.json", log.dump(2) + "\n");
  print({{"best_epoch", result.best_epoch}, {"best_valid_loss", result.best_valid_loss},
         {"epochs", result.history.size()}, {"stop_reason", result.stop_reason}});
  return 0;
}

int cmd_generate(const fs::path& ckpt, const fs::path& in, const fs::path& out, std::size_t max_len) {
  const auto c = nnet::load_checkpoint(ckpt);
  const auto& cfg = c.model->config();
  const auto records = nnet::load_records(in);
  std::ofstream o(out);
  if (!o) throw std::runtime_error("cannot write " + out.string());
  for (const auto& r : records) {
    const auto ex = nnet::encode_example(r, c.vocabs, cfg);
    const auto ids = c.model->greedy_decode(ex, max_len ? max_len : cfg.decode_max_len);
    o << corpus::join_tokens(corpus::decode_sequence(ids, c.vocabs.comment)) << '\n';
  }
  print({{"records", records.size()}, {"out", out.string()}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Code comment generation from source, AST and API documentation"};
  app.require_subcommand(1);

  fs::path in, out;
  auto* pre = app.add_subcommand("preprocess", "Filter and tokenize a raw JSONL corpus");
  corpus::FilterRules rules;
  pre->add_option("--in", in, "Raw corpus (code, docstring per line)")->required();
  pre->add_option("--out", out, "Filtered corpus")->required();
  pre->add_option("--max-code-len", rules.max_code_len, "Maximum code subtokens")->capture_default_str();
  pre->add_option("--max-comment-len", rules.max_comment_len, "Maximum comment subtokens")->capture_default_str();

  auto* ext = app.add_subcommand("extract-apis", "Add api_calls and flat_ast to each record");
  std::size_t ast_max_len = 512;
  ext->add_option("--in", in)->required();
  ext->add_option("--out", out)->required();
  ext->add_option("--ast-max-len", ast_max_len)->capture_default_str();

  auto* bkb = app.add_subcommand("build-kb", "Index a name/arity/class/description TSV");
  bkb->add_option("--in", in, "TSV: name, arity, class_path, description")->required();
  bkb->add_option("--out", out, "KB index (JSON)")->required();

  auto* att = app.add_subcommand("attach-docs", "Add doc_tokens and api_count to each record");
  fs::path kb_path;
  std::size_t max_doc_len = 256;
  att->add_option("--kb", kb_path)->required();
  att->add_option("--in", in)->required();
  att->add_option("--out", out)->required();
  att->add_option("--max-doc-len", max_doc_len)->capture_default_str();

  auto* trn = app.add_subcommand("train", "Train a model and write a checkpoint directory");
  fs::path config_path, train_path, valid_path;
  bool quiet = false;
  trn->add_option("--config", config_path, "Model config (TOML)")->required();
  trn->add_option("--train", train_path)->required();
  trn->add_option("--valid", valid_path)->required();
  trn->add_option("--out", out, "Checkpoint directory")->required();
  trn->add_flag("--quiet", quiet, "No per-epoch log");

  auto* gen = app.add_subcommand("generate", "Greedy-decode one comment per input record");
  fs::path ckpt;
  std::size_t max_len = 0;
  gen->add_option("--ckpt", ckpt)->required();
  gen->add_option("--in", in)->required();
  gen->add_option("--out", out)->required();
  gen->add_option("--max-len", max_len, "Defaults to the checkpoint's decode_max_len");

  auto* met = app.add_subcommand("metrics", "Score hypotheses against references");
  fs::path refs, hyps;
  double beta = 1.0;
  met->add_option("--refs", refs)->required();
  met->add_option("--hyps", hyps)->required();
  met->add_option("--beta", beta, "ROUGE-L recall weight")->capture_default_str();
  met->add_option("--out", out, "Report JSON (stdout when omitted)");

  auto* run = app.add_subcommand("run", "Run an experiment spec");
  fs::path spec_path;
  run->add_option("--spec", spec_path, "Experiment TOML")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) {
      print(harness::preprocess(in, out, rules).to_json());
    } else if (*ext) {
      print(harness::extract_apis(in, out, ast_max_len).to_json());
    } else if (*bkb) {
      print(harness::build_kb_file(in, out).to_json());
    } else if (*att) {
      print(harness::attach_docs(apikb::ApiDocKb::load(kb_path), in, out, max_doc_len).to_json());
    } else if (*trn) {
      return cmd_train(config_path, train_path, valid_path, out, quiet);
    } else if (*gen) {
      return cmd_generate(ckpt, in, out, max_len);
    } else if (*met) {
      const auto report = metrics::evaluate_files(refs, hyps, beta).to_json();
      if (out.empty()) {
        print(report);
      } else {
        util::write_text(out, report.dump(2) + "\n");
      }
    } else if (*run) {
      const auto spec = harness::ExperimentSpec::from_toml_file(spec_path);
      const auto result = harness::run_experiment(spec, [](const std::string& m) { std::cerr << m << '\n'; });
      int failed = 0;
      for (const auto& v : result.variants) failed += !v.ok;
      print(result.manifest);
      return failed ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
