#pragma once

// Small text helpers shared by the file formats: shortest round-trip number
// rendering, strict number parsing, CSV splitting and checksums.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace solrad {

/// Shortest decimal that parses back to the same double.
std::string format_real(double value);

/// Full-token parses; nullopt on any leftover characters.
std::optional<double> parse_real(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Splits one CSV record. Double-quoted fields may contain commas; `""`
/// inside quotes is a literal quote.
std::vector<std::string> split_csv_line(std::string_view line);

/// CRC-32 (IEEE) of a byte range, rendered as 8 lowercase hex digits when
/// asked for text.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);
std::uint32_t crc32(std::string_view text);
std::string hex32(std::uint32_t value);

std::string read_text_file(const std::string& path);
/// Writes atomically enough for our purposes: truncate then write.
void write_text_file(const std::string& path, std::string_view content);

}  // namespace solrad
