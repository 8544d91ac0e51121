#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace textnet::io {

/// Lowercase hex SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's contents. Throws DataError when unreadable.
std::string file_sha256(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Writes atomically (temp file + rename). Throws DataError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Writes only when the file is missing or its bytes differ. Returns true if written.
bool write_if_changed(const std::filesystem::path& path, std::string_view contents);

/// Non-empty, non-comment ('#') lines with surrounding whitespace trimmed.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

/// Fixed 6-decimal rendering used by every CSV output.
std::string fixed6(double value);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view field);

/// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);

std::string trim(std::string_view s);

// UTF-8 helpers. Invalid bytes decode to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view s);
std::string utf8_encode(char32_t cp);
std::size_t utf8_length(std::string_view s);

}  // namespace textnet::io
