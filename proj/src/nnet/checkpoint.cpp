#include "api2com/nnet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace api2com::nnet {

using nlohmann::json;

namespace {

constexpr char kMagic[] = "API2COM-CKPT\n";
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated checkpoint");
  return v;
}

}  // namespace

void write_model(std::ostream& out, const Model& model, const json& extra) {
  json header = extra;
  header["config"] = model.config().to_json();
  const auto& s = model.sizes();
  header["vocab_sizes"] = {{"code", s.code}, {"ast", s.ast}, {"doc", s.doc}, {"comment", s.comment}};
  header["params"] = json::array();
  for (const auto& p : model.params().all()) {
    header["params"].push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  }
  const std::string text = header.dump();
  out.write(kMagic, sizeof kMagic - 1);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : model.params().all()) {
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p->value.size())));
  }
  if (!out) throw std::runtime_error("failed writing checkpoint");
}

std::unique_ptr<Model> read_model(std::istream& in, json* header_out) {
  char magic[sizeof kMagic - 1];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a checkpoint file");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto len = read_pod<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw std::runtime_error("truncated checkpoint header");
  const json header = json::parse(text);
  const auto config = ModelConfig::from_json(header.at("config"));
  const auto& vs = header.at("vocab_sizes");
  auto model = std::make_unique<Model>(
      config, VocabSizes{vs.at("code").get<std::size_t>(), vs.at("ast").get<std::size_t>(),
                         vs.at("doc").get<std::size_t>(), vs.at("comment").get<std::size_t>()});
  const auto& params = header.at("params");
  if (params.size() != model->params().all().size()) throw std::runtime_error("checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *model->params().all()[i];
    const auto& d = params[i];
    if (d.at("name").get<std::string>() != p.name || d.at("rows").get<Eigen::Index>() != p.value.rows() ||
        d.at("cols").get<Eigen::Index>() != p.value.cols()) {
      throw std::runtime_error("checkpoint parameter " + d.at("name").get<std::string>() +
                               " does not match the model layout");
    }
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(p.value.size())));
    if (!in) throw std::runtime_error("truncated checkpoint data at " + p.name);
  }
  if (header_out) *header_out = header;
  return model;
}

void save_checkpoint(const std::filesystem::path& dir, const Model& model, const Vocabs& vocabs,
                     const CheckpointMeta& meta) {
  std::filesystem::create_directories(dir);
  vocabs.save(dir);
  json extra;
  extra["vocab_hashes"] = {{"code", vocabs.code.hash()},
                           {"ast", vocabs.ast.hash()},
                           {"doc", vocabs.doc.hash()},
                           {"comment", vocabs.comment.hash()}};
  extra["best_valid_loss"] = meta.best_valid_loss;
  extra["epoch"] = meta.epoch;
  std::ofstream out(dir / "model.bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "model.bin").string());
  write_model(out, model, extra);
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + (dir / "model.bin").string());
  Checkpoint c;
  json header;
  c.model = read_model(in, &header);
  c.vocabs = Vocabs::load(dir);
  const auto& h = header.at("vocab_hashes");
  if (h.at("code") != c.vocabs.code.hash() || h.at("ast") != c.vocabs.ast.hash() ||
      h.at("doc") != c.vocabs.doc.hash() || h.at("comment") != c.vocabs.comment.hash()) {
    throw std::runtime_error("vocabulary files in " + dir.string() + " do not match the checkpoint");
  }
  c.meta.best_valid_loss = header.at("best_valid_loss").get<double>();
  c.meta.epoch = header.at("epoch").get<int>();
  return c;
}

}  // namespace api2com::nnet
