#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>

#include <json.hpp>

#include "api2com/nnet/dataset.hpp"
#include "api2com/nnet/model.hpp"

namespace api2com::nnet {

struct CheckpointMeta {
  double best_valid_loss = 0;
  int epoch = 0;  // 1-based epoch the weights come from
};

/// Binary layout: magic line, uint32 version, uint64 header length, JSON
/// header (config, vocab sizes and hashes, meta, parameter names and
/// shapes), then every parameter as little-endian doubles in column-major
/// order, in header order.
void write_model(std::ostream& out, const Model& model, const nlohmann::json& extra);
/// Builds a model from the stored config and overwrites its parameters.
/// `header` receives the JSON header.
std::unique_ptr<Model> read_model(std::istream& in, nlohmann::json* header = nullptr);

struct Checkpoint {
  std::unique_ptr<Model> model;
  Vocabs vocabs;
  CheckpointMeta meta;
};

/// Writes model.bin and the four vocabulary TSVs into dir.
void save_checkpoint(const std::filesystem::path& dir, const Model& model, const Vocabs& vocabs,
                     const CheckpointMeta& meta);
/// Throws when the stored vocabulary hashes do not match the TSVs.
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace api2com::nnet
