#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace posmark::csv {

/// Quotes a field when it contains a comma, quote, or line break.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

/// Shortest decimal text that reads back to the same double.
std::string number(double value);
/// `number(*value)` or "NA".
std::string number_or_na(const std::optional<double>& value);

/// Parses RFC 4180 style CSV (quoted fields may contain commas, quotes, and
/// newlines). Throws posmark::Error on an unterminated quote.
std::vector<std::vector<std::string>> parse(std::string_view content);

/// Strict decimal parse; "NA" yields nullopt. Throws on anything else.
std::optional<double> parse_number(std::string_view field);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace posmark::csv
