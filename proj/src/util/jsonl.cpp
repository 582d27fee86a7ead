#include "api2com/util/jsonl.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace api2com::util {

using nlohmann::json;

JsonlLines read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  JsonlLines out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) throw std::runtime_error("line is not a JSON object");
      out.objects.push_back(std::move(j));
    } catch (const std::exception& e) {
      out.errors.emplace_back(lineno, e.what());
    }
  }
  return out;
}

std::string dump_compact(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& objects) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& j : objects) out << dump_compact(j) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace api2com::util
