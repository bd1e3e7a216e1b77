#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace dqm {

// Compact single-line dump; invalid UTF-8 is replaced rather than thrown on.
std::string dump_json(const nlohmann::ordered_json& j);

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::ordered_json>& rows);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, const std::string& bytes);

// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace dqm
