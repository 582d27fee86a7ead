#include "api2com/nnet/config.hpp"

#include <stdexcept>

#include <toml.hpp>

namespace api2com::nnet {

using nlohmann::json;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Base: return "base";
    case Variant::Ast: return "ast";
    case Variant::Api: return "api";
    case Variant::Full: return "full";
  }
  return "?";
}

std::string to_string(Cell c) { return c == Cell::Transformer ? "transformer" : "gru"; }

Variant variant_from_string(std::string_view s) {
  std::string l(s);
  for (auto& ch : l) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (l == "base") return Variant::Base;
  if (l == "ast") return Variant::Ast;
  if (l == "api") return Variant::Api;
  if (l == "full") return Variant::Full;
  throw std::invalid_argument("unknown variant '" + std::string(s) + "'");
}

Cell cell_from_string(std::string_view s) {
  std::string l(s);
  for (auto& ch : l) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (l == "transformer") return Cell::Transformer;
  if (l == "gru") return Cell::Gru;
  throw std::invalid_argument("unknown cell '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (layers < 1) fail("layers must be >= 1");
  if (heads < 1) fail("heads must be >= 1");
  if (d_model < 1 || d_model % heads != 0) fail("d_model must be a positive multiple of heads");
  if (d_ff < 1) fail("d_ff must be >= 1");
  if (dropout < 0 || dropout >= 1) fail("dropout must be in [0, 1)");
  if (rel_pos_k < 0) fail("rel_pos_k must be >= 0");
  if (!(lr0 > 0)) fail("lr0 must be > 0");
  if (!(lr_floor < lr0)) fail("lr_floor must be below lr0");
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (patience < 1) fail("patience must be >= 1");
  if (clip_norm < 0) fail("clip_norm must be >= 0");
  if (max_code_len < 1 || max_comment_len < 1 || max_ast_len < 1 || max_doc_len < 1) {
    fail("length limits must be >= 1");
  }
  if (decode_max_len < 1) fail("decode_max_len must be >= 1");
}

json ModelConfig::to_json() const {
  return json{{"layers", layers},
              {"heads", heads},
              {"d_model", d_model},
              {"d_ff", d_ff},
              {"dropout", dropout},
              {"rel_pos_k", rel_pos_k},
              {"variant", to_string(variant)},
              {"cell", to_string(cell)},
              {"lr0", lr0},
              {"lr_floor", lr_floor},
              {"max_epochs", max_epochs},
              {"batch_size", batch_size},
              {"patience", patience},
              {"clip_norm", clip_norm},
              {"seed", seed},
              {"max_code_len", max_code_len},
              {"max_comment_len", max_comment_len},
              {"max_ast_len", max_ast_len},
              {"max_doc_len", max_doc_len},
              {"min_count", min_count},
              {"max_vocab", max_vocab},
              {"decode_max_len", decode_max_len}};
}

ModelConfig ModelConfig::from_json(const json& j) {
  ModelConfig c;
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.d_model = j.value("d_model", c.d_model);
  c.d_ff = j.value("d_ff", 4 * c.d_model);
  c.dropout = j.value("dropout", c.dropout);
  c.rel_pos_k = j.value("rel_pos_k", c.rel_pos_k);
  if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
  if (j.contains("cell")) c.cell = cell_from_string(j.at("cell").get<std::string>());
  c.lr0 = j.value("lr0", c.lr0);
  c.lr_floor = j.value("lr_floor", c.lr_floor);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.patience = j.value("patience", c.patience);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.seed = j.value("seed", c.seed);
  c.max_code_len = j.value("max_code_len", c.max_code_len);
  c.max_comment_len = j.value("max_comment_len", c.max_comment_len);
  c.max_ast_len = j.value("max_ast_len", c.max_ast_len);
  c.max_doc_len = j.value("max_doc_len", c.max_doc_len);
  c.min_count = j.value("min_count", c.min_count);
  c.max_vocab = j.value("max_vocab", c.max_vocab);
  c.decode_max_len = j.value("decode_max_len", c.decode_max_len);
  c.validate();
  return c;
}

namespace {

// TOML scalars into the JSON shape from_json reads, so both share defaults.
json toml_to_json(const toml::table& t) {
  json j = json::object();
  for (const auto& [k, node] : t) {
    const std::string key(k.str());
    if (auto v = node.value<std::int64_t>(); v && node.is_integer()) {
      j[key] = *v;
    } else if (auto d = node.value<double>(); d && node.is_floating_point()) {
      j[key] = *d;
    } else if (auto s = node.value<std::string>()) {
      j[key] = *s;
    } else if (auto b = node.value<bool>()) {
      j[key] = *b;
    } else if (node.is_table()) {
      json sub = toml_to_json(*node.as_table());
      for (auto& [sk, sv] : sub.items()) j[sk] = sv;
    } else {
      throw std::invalid_argument("config: unsupported value for '" + key + "'");
    }
  }
  return j;
}

}  // namespace

ModelConfig ModelConfig::from_toml(std::string_view text) {
  toml::table t;
  try {
    t = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + std::string(e.description()));
  }
  json j = toml_to_json(t);
  if (j.contains("d_model") && !j.contains("d_ff")) j["d_ff"] = 4 * j.at("d_model").get<int>();
  return from_json(j);
}

ModelConfig ModelConfig::from_toml_file(const std::filesystem::path& path) {
  toml::table t;
  try {
    t = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + std::string(e.description()));
  }
  json j = toml_to_json(t);
  if (j.contains("d_model") && !j.contains("d_ff")) j["d_ff"] = 4 * j.at("d_model").get<int>();
  return from_json(j);
}

}  // namespace api2com::nnet
