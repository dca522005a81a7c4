#pragma once

// Small text helpers shared by the file readers and writers.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cropdt {

/// Splits one comma-separated line. Double-quoted cells may contain commas
/// and doubled quotes. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_line(std::string_view line);

/// Quotes a cell when it contains a comma, quote or leading/trailing space.
std::string csv_cell(std::string_view text);
/// Always quotes.
std::string csv_quoted(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double value);
/// Strict decimal parse of the whole (trimmed) string.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);
std::optional<std::uint64_t> parse_unsigned(std::string_view text);

std::string_view trim(std::string_view text);
/// Removes a trailing '\r' left by CRLF input.
std::string_view chomp(std::string_view line);

}  // namespace cropdt
