#pragma once

#include <string>
#include <vector>

#include "api2com/nnet/config.hpp"
#include "api2com/nnet/layers.hpp"

namespace api2com::nnet {

/// Encoder output: one row per source position and which rows may be
/// attended to (non-PAD).
struct Memory {
  Var states;
  std::vector<bool> valid;
};

/// Concatenation along the sequence axis; masks are concatenated likewise.
Memory fuse_memories(G& g, const std::vector<Memory>& parts);

std::vector<bool> non_pad(const std::vector<int>& ids);

struct EncoderLayer {
  MultiHeadAttention self;
  LayerNorm ln1;
  FeedForward ff;
  LayerNorm ln2;
};

/// Embedding, then post-norm self-attention / feed-forward layers.
struct TransformerEncoder {
  P* embed = nullptr;
  std::vector<EncoderLayer> layers;

  static TransformerEncoder make(ParamStore& s, const std::string& name, const ModelConfig& c,
                                 std::size_t vocab, Rng& rng);
  Memory operator()(const Ctx& c, const std::vector<int>& ids) const;
};

struct DecoderLayer {
  MultiHeadAttention self;
  LayerNorm ln1;
  MultiHeadAttention cross;
  LayerNorm ln2;
  FeedForward ff;
  LayerNorm ln3;
};

struct TransformerDecoder {
  P* embed = nullptr;
  std::vector<DecoderLayer> layers;
  Linear out;

  static TransformerDecoder make(ParamStore& s, const std::string& name, const ModelConfig& c,
                                 std::size_t vocab, Rng& rng);
  /// Logits (prefix length x vocab); throws on an empty prefix.
  Var operator()(const Ctx& c, const Memory& memory, const std::vector<int>& prefix) const;
};

}  // namespace api2com::nnet
