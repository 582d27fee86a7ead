#include "api2com/nnet/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace api2com::nnet {

P& ParamStore::add(const std::string& name, Matrix init) {
  if (by_name_.contains(name)) throw std::invalid_argument("duplicate parameter " + name);
  by_name_.emplace(name, params_.size());
  params_.push_back(std::make_unique<P>(name, std::move(init)));
  return *params_.back();
}

P& ParamStore::xavier(const std::string& name, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const Real limit = std::sqrt(6.0 / static_cast<Real>(rows + cols));
  std::uniform_real_distribution<Real> u(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  }
  return add(name, std::move(m));
}

P& ParamStore::constant(const std::string& name, Eigen::Index rows, Eigen::Index cols, Real v) {
  return add(name, Matrix::Constant(rows, cols, v));
}

P* ParamStore::find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

const P* ParamStore::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

Linear Linear::make(ParamStore& s, const std::string& name, int in, int out, Rng& rng, bool bias) {
  Linear l;
  l.w = &s.xavier(name + ".w", in, out, rng);
  if (bias) l.b = &s.constant(name + ".b", 1, out, 0.0);
  return l;
}

Var Linear::operator()(G& g, Var x) const {
  Var y = g.matmul(x, g.param(*w));
  return b ? g.add_row(y, g.param(*b)) : y;
}

LayerNorm LayerNorm::make(ParamStore& s, const std::string& name, int dim) {
  return {&s.constant(name + ".gain", 1, dim, 1.0), &s.constant(name + ".bias", 1, dim, 0.0)};
}

Var LayerNorm::operator()(G& g, Var x) const { return g.layer_norm(x, g.param(*gain), g.param(*bias)); }

RelPos RelPos::make(ParamStore& s, const std::string& name, int k, int d_head, Rng& rng) {
  RelPos r;
  r.k = k;
  if (k > 0) {
    r.key = &s.xavier(name + ".rel_key", 2 * k + 1, d_head, rng);
    r.value = &s.xavier(name + ".rel_value", 2 * k + 1, d_head, rng);
  }
  return r;
}

AttentionOut scaled_attention(G& g, Var q, Var k, Var v, const Mask* allowed, Var rel_key,
                              Var rel_value, int rel_k) {
  const auto d_k = g.value(q).cols();
  if (g.value(k).cols() != d_k || g.value(k).rows() != g.value(v).rows()) {
    throw ShapeError("attention: Q " + shape_str(g.value(q).rows(), d_k) + ", K " +
                     shape_str(g.value(k).rows(), g.value(k).cols()) + ", V " +
                     shape_str(g.value(v).rows(), g.value(v).cols()));
  }
  const auto m = g.value(k).rows();
  Var scores = g.matmul_nt(q, k);
  if (rel_key.valid()) scores = g.add(scores, g.rel_gather(g.matmul_nt(q, rel_key), m, rel_k));
  scores = g.scale(scores, 1.0 / std::sqrt(static_cast<Real>(d_k)));
  Var w = g.softmax_rows(scores, allowed);
  Var out = g.matmul(w, v);
  if (rel_value.valid()) out = g.add(out, g.matmul(g.rel_scatter(w, rel_k), rel_value));
  return {out, w};
}

MultiHeadAttention MultiHeadAttention::make(ParamStore& s, const std::string& name, int d_model,
                                            int heads, int rel_k, Rng& rng) {
  if (heads < 1 || d_model % heads != 0) throw std::invalid_argument("d_model must divide into heads");
  MultiHeadAttention a;
  a.heads = heads;
  a.d_model = d_model;
  a.wq = &s.xavier(name + ".wq", d_model, d_model, rng);
  a.wk = &s.xavier(name + ".wk", d_model, d_model, rng);
  a.wv = &s.xavier(name + ".wv", d_model, d_model, rng);
  a.wo = &s.xavier(name + ".wo", d_model, d_model, rng);
  a.rel = RelPos::make(s, name, rel_k, d_model / heads, rng);
  return a;
}

Var MultiHeadAttention::operator()(G& g, Var x_q, Var x_kv, const Mask* allowed) const {
  if (g.value(x_q).cols() != d_model || g.value(x_kv).cols() != d_model) {
    throw ShapeError("multi-head attention expects width " + std::to_string(d_model) + ", got " +
                     shape_str(g.value(x_q).rows(), g.value(x_q).cols()) + " and " +
                     shape_str(g.value(x_kv).rows(), g.value(x_kv).cols()));
  }
  const int d_k = d_model / heads;
  Var q = g.matmul(x_q, g.param(*wq));
  Var k = g.matmul(x_kv, g.param(*wk));
  Var v = g.matmul(x_kv, g.param(*wv));
  Var rk, rv;
  if (rel.k > 0) {
    rk = g.param(*rel.key);
    rv = g.param(*rel.value);
  }
  std::vector<Var> outs;
  outs.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    outs.push_back(scaled_attention(g, g.slice_cols(q, h * d_k, d_k), g.slice_cols(k, h * d_k, d_k),
                                    g.slice_cols(v, h * d_k, d_k), allowed, rk, rv, rel.k)
                       .out);
  }
  Var cat = heads == 1 ? outs[0] : g.concat_cols(outs);
  return g.matmul(cat, g.param(*wo));
}

FeedForward FeedForward::make(ParamStore& s, const std::string& name, int d_model, int d_ff, Rng& rng) {
  return {Linear::make(s, name + ".in", d_model, d_ff, rng), Linear::make(s, name + ".out", d_ff, d_model, rng)};
}

Var FeedForward::operator()(const Ctx& c, Var x) const { return out(c.g, c.g.relu(in(c.g, x))); }

Mask key_mask(Eigen::Index n_q, const std::vector<bool>& key_valid) {
  Mask m(n_q, static_cast<Eigen::Index>(key_valid.size()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j).setConstant(key_valid[static_cast<std::size_t>(j)]);
  return m;
}

Mask causal_mask(const std::vector<bool>& key_valid) {
  const auto n = static_cast<Eigen::Index>(key_valid.size());
  Mask m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = j <= i && key_valid[static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace api2com::nnet
