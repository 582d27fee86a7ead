#include "api2com/nnet/transformer.hpp"

#include <stdexcept>

#include "api2com/corpus/vocab.hpp"

namespace api2com::nnet {

Memory fuse_memories(G& g, const std::vector<Memory>& parts) {
  if (parts.empty()) throw std::invalid_argument("no memories to fuse");
  if (parts.size() == 1) return parts[0];
  Memory m;
  std::vector<Var> states;
  for (const auto& p : parts) {
    if (g.value(p.states).cols() != g.value(parts[0].states).cols()) {
      throw ShapeError("fuse_memories: width " + std::to_string(g.value(p.states).cols()) + " vs " +
                       std::to_string(g.value(parts[0].states).cols()));
    }
    states.push_back(p.states);
    m.valid.insert(m.valid.end(), p.valid.begin(), p.valid.end());
  }
  m.states = g.concat_rows(states);
  return m;
}

std::vector<bool> non_pad(const std::vector<int>& ids) {
  std::vector<bool> v(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) v[i] = ids[i] != corpus::kPad;
  return v;
}

TransformerEncoder TransformerEncoder::make(ParamStore& s, const std::string& name, const ModelConfig& c,
                                            std::size_t vocab, Rng& rng) {
  TransformerEncoder e;
  e.embed = &s.xavier(name + ".embed", static_cast<Eigen::Index>(vocab), c.d_model, rng);
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = name + ".layer" + std::to_string(l);
    e.layers.push_back({MultiHeadAttention::make(s, p + ".self", c.d_model, c.heads, c.rel_pos_k, rng),
                        LayerNorm::make(s, p + ".ln1", c.d_model),
                        FeedForward::make(s, p + ".ff", c.d_model, c.d_ff, rng),
                        LayerNorm::make(s, p + ".ln2", c.d_model)});
  }
  return e;
}

Memory TransformerEncoder::operator()(const Ctx& c, const std::vector<int>& ids) const {
  if (ids.empty()) throw std::invalid_argument("encoder input is empty");
  G& g = c.g;
  Memory m;
  m.valid = non_pad(ids);
  const Mask allowed = key_mask(static_cast<Eigen::Index>(ids.size()), m.valid);
  Var x = c.drop(g.gather_rows(g.param(*embed), ids));
  for (const auto& layer : layers) {
    x = layer.ln1(g, g.add(x, c.drop(layer.self(g, x, x, &allowed))));
    x = layer.ln2(g, g.add(x, c.drop(layer.ff(c, x))));
  }
  m.states = x;
  return m;
}

TransformerDecoder TransformerDecoder::make(ParamStore& s, const std::string& name, const ModelConfig& c,
                                            std::size_t vocab, Rng& rng) {
  TransformerDecoder d;
  d.embed = &s.xavier(name + ".embed", static_cast<Eigen::Index>(vocab), c.d_model, rng);
  for (int l = 0; l < c.layers; ++l) {
    const std::string p = name + ".layer" + std::to_string(l);
    d.layers.push_back({MultiHeadAttention::make(s, p + ".self", c.d_model, c.heads, c.rel_pos_k, rng),
                        LayerNorm::make(s, p + ".ln1", c.d_model),
                        MultiHeadAttention::make(s, p + ".cross", c.d_model, c.heads, 0, rng),
                        LayerNorm::make(s, p + ".ln2", c.d_model),
                        FeedForward::make(s, p + ".ff", c.d_model, c.d_ff, rng),
                        LayerNorm::make(s, p + ".ln3", c.d_model)});
  }
  d.out = Linear::make(s, name + ".out", c.d_model, static_cast<int>(vocab), rng);
  return d;
}

Var TransformerDecoder::operator()(const Ctx& c, const Memory& memory, const std::vector<int>& prefix) const {
  if (prefix.empty()) throw std::invalid_argument("decoder prefix is empty");
  G& g = c.g;
  const auto n = static_cast<Eigen::Index>(prefix.size());
  const Mask self_mask = causal_mask(non_pad(prefix));
  const Mask cross_mask = key_mask(n, memory.valid);
  Var x = c.drop(g.gather_rows(g.param(*embed), prefix));
  for (const auto& layer : layers) {
    x = layer.ln1(g, g.add(x, c.drop(layer.self(g, x, x, &self_mask))));
    x = layer.ln2(g, g.add(x, c.drop(layer.cross(g, x, memory.states, &cross_mask))));
    x = layer.ln3(g, g.add(x, c.drop(layer.ff(c, x))));
  }
  return out(g, x);
}

}  // namespace api2com::nnet
