#pragma once

#include <string>
#include <vector>

#include "api2com/nnet/config.hpp"
#include "api2com/nnet/layers.hpp"
#include "api2com/nnet/transformer.hpp"

namespace api2com::nnet {

/// z = sigmoid(x Wz + h Uz + bz)
/// r = sigmoid(x Wr + h Ur + br)
/// n = tanh(x Wn + bn + r * (h Un + bun))
/// h' = (1 - z) * n + z * h
struct GruCell {
  P *wz = nullptr, *wr = nullptr, *wn = nullptr;  // in x hidden
  P *uz = nullptr, *ur = nullptr, *un = nullptr;  // hidden x hidden
  P *bz = nullptr, *br = nullptr, *bn = nullptr, *bun = nullptr;

  static GruCell make(ParamStore& s, const std::string& name, int in, int hidden, Rng& rng);

  /// Input projections for all rows of x at once: (x Wz + bz, x Wr + br, x Wn + bn).
  struct Projected {
    Var z, r, n;
  };
  Projected project(G& g, Var x) const;
  /// One step from row t of the projections.
  Var step(G& g, const Projected& px, Eigen::Index t, Var h) const;
  /// Single step on a 1 x in input.
  Var operator()(G& g, Var x, Var h) const;
};

/// GRU over the embedded sequence. PAD steps carry the state through and
/// are masked in the memory. `final` is the state after the last step.
struct GruEncoder {
  P* embed = nullptr;
  GruCell cell;
  int hidden = 0;

  static GruEncoder make(ParamStore& s, const std::string& name, const ModelConfig& c, std::size_t vocab,
                         Rng& rng);
  Memory operator()(const Ctx& c, const std::vector<int>& ids, Var* final = nullptr) const;
};

/// GRU decoder with dot attention over the memory:
/// o_t = tanh([h_t, context_t] Wc + bc), logits_t = o_t Wout + bout.
struct GruDecoder {
  P* embed = nullptr;
  GruCell cell;
  Linear combine;
  Linear out;
  int hidden = 0;

  static GruDecoder make(ParamStore& s, const std::string& name, const ModelConfig& c, std::size_t vocab,
                         Rng& rng);
  Var operator()(const Ctx& c, const Memory& memory, Var h0, const std::vector<int>& prefix) const;
};

}  // namespace api2com::nnet
