#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mcpgw/error.hpp"

namespace mcpgw::util {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

/// Parses a JSON document. Syntax errors are raised with `code` and carry the
/// 1-based line and column of the failure.
json read_json_file(const std::filesystem::path& path, Errc code = Errc::CorruptFile);

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never observes a partially written document.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Pretty-printed, key-sorted, newline-terminated JSON.
void write_json_file(const std::filesystem::path& path, const json& doc);

}  // namespace mcpgw::util
