#include "api2com/nnet/gru.hpp"

#include <stdexcept>

#include "api2com/corpus/vocab.hpp"

namespace api2com::nnet {

GruCell GruCell::make(ParamStore& s, const std::string& name, int in, int hidden, Rng& rng) {
  GruCell c;
  c.wz = &s.xavier(name + ".wz", in, hidden, rng);
  c.wr = &s.xavier(name + ".wr", in, hidden, rng);
  c.wn = &s.xavier(name + ".wn", in, hidden, rng);
  c.uz = &s.xavier(name + ".uz", hidden, hidden, rng);
  c.ur = &s.xavier(name + ".ur", hidden, hidden, rng);
  c.un = &s.xavier(name + ".un", hidden, hidden, rng);
  c.bz = &s.constant(name + ".bz", 1, hidden, 0.0);
  c.br = &s.constant(name + ".br", 1, hidden, 0.0);
  c.bn = &s.constant(name + ".bn", 1, hidden, 0.0);
  c.bun = &s.constant(name + ".bun", 1, hidden, 0.0);
  return c;
}

GruCell::Projected GruCell::project(G& g, Var x) const {
  return {g.add_row(g.matmul(x, g.param(*wz)), g.param(*bz)),
          g.add_row(g.matmul(x, g.param(*wr)), g.param(*br)),
          g.add_row(g.matmul(x, g.param(*wn)), g.param(*bn))};
}

Var GruCell::step(G& g, const Projected& px, Eigen::Index t, Var h) const {
  Var z = g.sigmoid(g.add(g.slice_rows(px.z, t, 1), g.matmul(h, g.param(*uz))));
  Var r = g.sigmoid(g.add(g.slice_rows(px.r, t, 1), g.matmul(h, g.param(*ur))));
  Var hn = g.add_row(g.matmul(h, g.param(*un)), g.param(*bun));
  Var n = g.tanh(g.add(g.slice_rows(px.n, t, 1), g.mul(r, hn)));
  return g.add(g.mul(g.one_minus(z), n), g.mul(z, h));
}

Var GruCell::operator()(G& g, Var x, Var h) const { return step(g, project(g, x), 0, h); }

GruEncoder GruEncoder::make(ParamStore& s, const std::string& name, const ModelConfig& c, std::size_t vocab,
                            Rng& rng) {
  GruEncoder e;
  e.embed = &s.xavier(name + ".embed", static_cast<Eigen::Index>(vocab), c.d_model, rng);
  e.cell = GruCell::make(s, name + ".gru", c.d_model, c.d_model, rng);
  e.hidden = c.d_model;
  return e;
}

Memory GruEncoder::operator()(const Ctx& c, const std::vector<int>& ids, Var* final) const {
  if (ids.empty()) throw std::invalid_argument("encoder input is empty");
  G& g = c.g;
  Memory m;
  m.valid = non_pad(ids);
  Var x = c.drop(g.gather_rows(g.param(*embed), ids));
  const auto px = cell.project(g, x);
  Var h = g.constant(Matrix::Zero(1, hidden));
  std::vector<Var> rows;
  rows.reserve(ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (m.valid[t]) h = cell.step(g, px, static_cast<Eigen::Index>(t), h);
    rows.push_back(h);
  }
  m.states = rows.size() == 1 ? rows[0] : g.concat_rows(rows);
  if (final) *final = h;
  return m;
}

GruDecoder GruDecoder::make(ParamStore& s, const std::string& name, const ModelConfig& c, std::size_t vocab,
                            Rng& rng) {
  GruDecoder d;
  d.embed = &s.xavier(name + ".embed", static_cast<Eigen::Index>(vocab), c.d_model, rng);
  d.cell = GruCell::make(s, name + ".gru", c.d_model, c.d_model, rng);
  d.combine = Linear::make(s, name + ".combine", 2 * c.d_model, c.d_model, rng);
  d.out = Linear::make(s, name + ".out", c.d_model, static_cast<int>(vocab), rng);
  d.hidden = c.d_model;
  return d;
}

Var GruDecoder::operator()(const Ctx& c, const Memory& memory, Var h0, const std::vector<int>& prefix) const {
  if (prefix.empty()) throw std::invalid_argument("decoder prefix is empty");
  G& g = c.g;
  Var x = c.drop(g.gather_rows(g.param(*embed), prefix));
  const auto px = cell.project(g, x);
  Var h = h0;
  std::vector<Var> rows;
  rows.reserve(prefix.size());
  for (std::size_t t = 0; t < prefix.size(); ++t) {
    h = cell.step(g, px, static_cast<Eigen::Index>(t), h);
    rows.push_back(h);
  }
  Var hs = rows.size() == 1 ? rows[0] : g.concat_rows(rows);
  const Mask allowed = key_mask(static_cast<Eigen::Index>(prefix.size()), memory.valid);
  Var weights = g.softmax_rows(g.matmul_nt(hs, memory.states), &allowed);
  Var context = g.matmul(weights, memory.states);
  Var o = c.drop(g.tanh(combine(g, g.concat_cols({hs, context}))));
  return out(g, o);
}

}  // namespace api2com::nnet
