#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dalk::text {

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Collapses every run of whitespace into a single space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Identity form of an entity / relation name: typographic quotes folded to
// ASCII, whitespace collapsed, ASCII letters lowercased.
std::string normalize_name(std::string_view s);

// Splits on '\n', dropping a trailing '\r' from every line.
std::vector<std::string> split_lines(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

bool contains_ci(std::string_view haystack, std::string_view needle);

// Byte offset of every code point in a UTF-8 string, followed by the total
// byte length. Invalid sequences count one code point per byte.
std::vector<std::size_t> codepoint_offsets(std::string_view utf8);

std::size_t codepoint_count(std::string_view utf8);

// Backslash escaping for TSV fields (\t, \n, \r, \\).
std::string escape_tsv(std::string_view s);
std::string unescape_tsv(std::string_view s);

// Whitespace-delimited token count.
std::size_t word_count(std::string_view s);

}  // namespace dalk::text
