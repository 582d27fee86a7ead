#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "api2com/nnet/config.hpp"
#include "api2com/nnet/gru.hpp"
#include "api2com/nnet/layers.hpp"
#include "api2com/nnet/transformer.hpp"

namespace api2com::nnet {

struct VocabSizes {
  std::size_t code = 0;
  std::size_t ast = 0;
  std::size_t doc = 0;
  std::size_t comment = 0;
};

/// One encoded training / test pair. Source sequences are never empty (an
/// absent source is a single PAD); comment is BOS ... EOS.
struct Example {
  std::vector<int> code;
  std::vector<int> ast;
  std::vector<int> doc;
  std::vector<int> comment;
};

/// The comment model: Transformer or GRU encoders for the active sources,
/// memories fused along the sequence axis, and a decoder over the fusion.
/// Parameters for inactive sources are not created.
class Model {
 public:
  Model(const ModelConfig& config, const VocabSizes& sizes);

  const ModelConfig& config() const { return config_; }
  const VocabSizes& sizes() const { return sizes_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  /// Fused memory of the active encoders. `init` receives the decoder's
  /// initial state for the GRU cell.
  Memory encode(const Ctx& c, const Example& ex, Var* init = nullptr) const;
  Var decode(const Ctx& c, const Memory& memory, Var init, const std::vector<int>& prefix) const;

  /// Teacher-forced logits for prefix, one row per prefix position.
  Var logits(const Ctx& c, const Example& ex, const std::vector<int>& prefix) const;

  /// Summed cross-entropy of comment[1:] given comment[:-1]; PAD targets
  /// are ignored. `tokens` receives the number of scored positions.
  Var loss(const Ctx& c, const Example& ex, std::size_t* tokens = nullptr) const;

  /// Argmax decoding from BOS until EOS or max_len tokens; BOS/EOS stripped.
  std::vector<int> greedy_decode(const Example& ex, std::size_t max_len) const;

 private:
  ModelConfig config_;
  VocabSizes sizes_;
  ParamStore params_;

  TransformerEncoder t_code_, t_ast_, t_doc_;
  TransformerDecoder t_dec_;
  GruEncoder g_code_, g_ast_, g_doc_;
  GruDecoder g_dec_;
};

}  // namespace api2com::nnet
