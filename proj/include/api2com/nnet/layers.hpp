#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "api2com/nnet/graph.hpp"

namespace api2com::nnet {

using Real = double;
using Matrix = Mat<Real>;
using G = Graph<Real>;
using P = Param<Real>;
using Rng = std::mt19937_64;

/// Owns the model parameters in creation order; names are unique.
class ParamStore {
 public:
  P& add(const std::string& name, Matrix init);
  /// Uniform in +-sqrt(6 / (rows + cols)).
  P& xavier(const std::string& name, Eigen::Index rows, Eigen::Index cols, Rng& rng);
  P& constant(const std::string& name, Eigen::Index rows, Eigen::Index cols, Real v);

  P* find(const std::string& name);
  const P* find(const std::string& name) const;
  const std::vector<std::unique_ptr<P>>& all() const { return params_; }
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<std::unique_ptr<P>> params_;
  std::map<std::string, std::size_t> by_name_;
};

/// Per-forward state: graph, train/eval mode and the dropout stream.
struct Ctx {
  G& g;
  bool train = false;
  Real dropout = 0;
  Rng* rng = nullptr;

  Var drop(Var v) const { return train && rng && dropout > 0 ? g.dropout(v, dropout, *rng) : v; }
};

struct Linear {
  P* w = nullptr;  // in x out
  P* b = nullptr;  // 1 x out, may be null

  static Linear make(ParamStore& s, const std::string& name, int in, int out, Rng& rng, bool bias = true);
  Var operator()(G& g, Var x) const;
};

struct LayerNorm {
  P* gain = nullptr;
  P* bias = nullptr;

  static LayerNorm make(ParamStore& s, const std::string& name, int dim);
  Var operator()(G& g, Var x) const;
};

/// Learned vectors for clipped offsets -k..k, shared by all heads of a layer.
struct RelPos {
  P* key = nullptr;    // (2k+1) x d_head
  P* value = nullptr;  // (2k+1) x d_head
  int k = 0;

  static RelPos make(ParamStore& s, const std::string& name, int k, int d_head, Rng& rng);
};

struct AttentionOut {
  Var out;
  Var weights;
};

/// softmax((Q K^T + rel key terms) / sqrt(d_k)) V, plus rel value terms
/// inside the weighted sum when rel_key / rel_value are given.
AttentionOut scaled_attention(G& g, Var q, Var k, Var v, const Mask* allowed, Var rel_key = {},
                              Var rel_value = {}, int rel_k = 0);

struct MultiHeadAttention {
  int heads = 1;
  int d_model = 0;
  P* wq = nullptr;  // d_model x d_model; head i uses columns [i*d_k, (i+1)*d_k)
  P* wk = nullptr;
  P* wv = nullptr;
  P* wo = nullptr;
  RelPos rel;  // rel.k == 0 disables relative positions

  static MultiHeadAttention make(ParamStore& s, const std::string& name, int d_model, int heads,
                                 int rel_k, Rng& rng);
  Var operator()(G& g, Var x_q, Var x_kv, const Mask* allowed) const;
};

struct FeedForward {
  Linear in;
  Linear out;

  static FeedForward make(ParamStore& s, const std::string& name, int d_model, int d_ff, Rng& rng);
  Var operator()(const Ctx& c, Var x) const;
};

/// allowed(i, j) = key_valid[j], for n_q query rows.
Mask key_mask(Eigen::Index n_q, const std::vector<bool>& key_valid);
/// allowed(i, j) = j <= i && key_valid[j].
Mask causal_mask(const std::vector<bool>& key_valid);

}  // namespace api2com::nnet
