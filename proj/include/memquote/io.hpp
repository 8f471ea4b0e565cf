#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace memquote {

std::string read_file(const std::filesystem::path& path);

/// Lines of a text file without trailing '\r' or '\n'.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes to a sibling temp file, flushes, then renames over `path`, so a
/// reader never observes a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// One JSON object per non-blank line. Throws ParseError with the 1-based
/// line number on malformed input.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

std::string to_jsonl(const std::vector<nlohmann::json>& rows);

}  // namespace memquote
