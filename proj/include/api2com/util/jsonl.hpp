#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace api2com::util {

struct JsonlLines {
  std::vector<nlohmann::json> objects;
  std::vector<std::pair<std::size_t, std::string>> errors;  // (1-based line, message)
};

/// Parses one JSON object per non-blank line; bad lines are collected.
JsonlLines read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& objects);

/// Compact dump that replaces invalid UTF-8 instead of throwing.
std::string dump_compact(const nlohmann::json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace api2com::util
