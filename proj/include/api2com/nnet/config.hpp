#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace api2com::nnet {

/// Which encoders feed the decoder: code only, code+AST, code+docs, all.
enum class Variant { Base, Ast, Api, Full };
enum class Cell { Transformer, Gru };

std::string to_string(Variant v);
std::string to_string(Cell c);
Variant variant_from_string(std::string_view s);
Cell cell_from_string(std::string_view s);

inline bool uses_ast(Variant v) { return v == Variant::Ast || v == Variant::Full; }
inline bool uses_doc(Variant v) { return v == Variant::Api || v == Variant::Full; }

struct ModelConfig {
  // architecture
  int layers = 2;
  int heads = 4;
  int d_model = 128;
  int d_ff = 512;
  double dropout = 0.1;
  int rel_pos_k = 16;
  Variant variant = Variant::Full;
  Cell cell = Cell::Transformer;

  // optimization
  double lr0 = 0.1;
  double lr_floor = 1e-7;
  int max_epochs = 100;
  int batch_size = 32;
  int patience = 2;
  double clip_norm = 0.0;  // 0 disables clipping
  std::uint64_t seed = 1;

  // data
  std::size_t max_code_len = 256;
  std::size_t max_comment_len = 64;
  std::size_t max_ast_len = 512;
  std::size_t max_doc_len = 256;
  std::size_t min_count = 2;
  std::size_t max_vocab = 30000;
  std::size_t decode_max_len = 64;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  int d_head() const { return d_model / heads; }

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  /// Keys mirror the field names; omitted keys keep their defaults. When
  /// d_model is set and d_ff is not, d_ff = 4 * d_model.
  static ModelConfig from_toml(std::string_view text);
  static ModelConfig from_toml_file(const std::filesystem::path& path);
};

}  // namespace api2com::nnet
