#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace recoding::text {

std::string_view trim(std::string_view s);
std::string_view trim_left(std::string_view s);

// ASCII-only case mapping; bytes >= 0x80 pass through.
std::string ascii_lower(std::string_view s);
std::string ascii_upper(std::string_view s);

// Upper-cases the first byte when it is an ASCII letter.
std::string capitalize_first(std::string_view s);

bool ends_with_space(std::string_view s);
bool starts_with_space(std::string_view s);
bool has_space(std::string_view s);

// Whitespace-delimited words.
std::vector<std::string_view> split_whitespace(std::string_view s);

// Lower-cased alphanumeric runs (ASCII letters/digits plus any non-ASCII byte).
std::vector<std::string> word_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace recoding::text
