#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbmltk {

/// Shortest "%g" rendering that parses back to the identical double.
std::string format_real(double value);

/// Strict decimal parse of the whole token (surrounding blanks ignored);
/// nullopt on trailing garbage.
std::optional<double> parse_real(std::string_view token);

bool is_identifier(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string to_lower(std::string_view text);

/// Backslash-escapes tab, newline, carriage return and backslash so a value
/// fits in a single TSV field.
std::string tsv_escape(std::string_view text);

/// Splits a byte buffer into lines, accepting LF or CRLF terminators.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace sbmltk
