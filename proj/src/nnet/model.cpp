#include "api2com/nnet/model.hpp"

#include <stdexcept>

#include "api2com/corpus/vocab.hpp"

namespace api2com::nnet {

Model::Model(const ModelConfig& config, const VocabSizes& sizes) : config_(config), sizes_(sizes) {
  config_.validate();
  if (sizes.code <= static_cast<std::size_t>(corpus::kEos) ||
      sizes.comment <= static_cast<std::size_t>(corpus::kEos)) {
    throw std::invalid_argument("code and comment vocabularies must hold the reserved ids");
  }
  if (uses_ast(config_.variant) && sizes.ast == 0) throw std::invalid_argument("AST vocabulary is empty");
  if (uses_doc(config_.variant) && sizes.doc == 0) throw std::invalid_argument("doc vocabulary is empty");
  Rng rng(config_.seed);
  if (config_.cell == Cell::Transformer) {
    t_code_ = TransformerEncoder::make(params_, "code", config_, sizes.code, rng);
    if (uses_ast(config_.variant)) t_ast_ = TransformerEncoder::make(params_, "ast", config_, sizes.ast, rng);
    if (uses_doc(config_.variant)) t_doc_ = TransformerEncoder::make(params_, "doc", config_, sizes.doc, rng);
    t_dec_ = TransformerDecoder::make(params_, "dec", config_, sizes.comment, rng);
  } else {
    g_code_ = GruEncoder::make(params_, "code", config_, sizes.code, rng);
    if (uses_ast(config_.variant)) g_ast_ = GruEncoder::make(params_, "ast", config_, sizes.ast, rng);
    if (uses_doc(config_.variant)) g_doc_ = GruEncoder::make(params_, "doc", config_, sizes.doc, rng);
    g_dec_ = GruDecoder::make(params_, "dec", config_, sizes.comment, rng);
  }
}

Memory Model::encode(const Ctx& c, const Example& ex, Var* init) const {
  std::vector<Memory> parts;
  if (config_.cell == Cell::Transformer) {
    parts.push_back(t_code_(c, ex.code));
    if (uses_ast(config_.variant)) parts.push_back(t_ast_(c, ex.ast));
    if (uses_doc(config_.variant)) parts.push_back(t_doc_(c, ex.doc));
  } else {
    Var h;
    parts.push_back(g_code_(c, ex.code, &h));
    if (init) *init = h;
    if (uses_ast(config_.variant)) parts.push_back(g_ast_(c, ex.ast));
    if (uses_doc(config_.variant)) parts.push_back(g_doc_(c, ex.doc));
  }
  return fuse_memories(c.g, parts);
}

Var Model::decode(const Ctx& c, const Memory& memory, Var init, const std::vector<int>& prefix) const {
  if (config_.cell == Cell::Transformer) return t_dec_(c, memory, prefix);
  if (!init.valid()) init = c.g.constant(Matrix::Zero(1, config_.d_model));
  return g_dec_(c, memory, init, prefix);
}

Var Model::logits(const Ctx& c, const Example& ex, const std::vector<int>& prefix) const {
  Var init;
  const Memory m = encode(c, ex, &init);
  return decode(c, m, init, prefix);
}

Var Model::loss(const Ctx& c, const Example& ex, std::size_t* tokens) const {
  if (ex.comment.size() < 2) throw std::invalid_argument("comment needs at least BOS and EOS");
  const std::vector<int> prefix(ex.comment.begin(), ex.comment.end() - 1);
  const std::vector<int> target(ex.comment.begin() + 1, ex.comment.end());
  if (tokens) {
    *tokens = 0;
    for (int t : target) *tokens += t != corpus::kPad;
  }
  return c.g.cross_entropy(logits(c, ex, prefix), target, corpus::kPad);
}

std::vector<int> Model::greedy_decode(const Example& ex, std::size_t max_len) const {
  G g(false);
  Ctx c{g};
  Var init;
  const Memory m = encode(c, ex, &init);
  std::vector<int> prefix{corpus::kBos};
  std::vector<int> out;
  while (out.size() < max_len) {
    Var lg = decode(c, m, init, prefix);
    const Matrix& v = g.value(lg);
    Eigen::Index best = 0;
    v.row(v.rows() - 1).maxCoeff(&best);
    const int id = static_cast<int>(best);
    if (id == corpus::kEos) break;
    out.push_back(id);
    prefix.push_back(id);
  }
  return out;
}

}  // namespace api2com::nnet
