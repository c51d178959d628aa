#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace recoding::utf8 {

// True when `text` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid(std::string_view text);

// Number of Unicode scalar values. Undefined on invalid input.
std::size_t scalar_count(std::string_view text);

// Prefix of at most `n` scalars.
std::string_view take_scalars(std::string_view text, std::size_t n);

}  // namespace recoding::utf8
