#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace blinkword {

// Collapses each maximal run of equal characters to one: "00000110000" ->
// "010". Characters other than '0'/'1' are an ArgumentError.
std::string normalize(std::string_view raw);

bool is_normalized(std::string_view pattern) noexcept;

// Number of closures ('1's) in a normalized pattern. Unnormalized input is an
// ArgumentError.
std::size_t blink_count(std::string_view pattern);

// Canonical pattern of a word with `count` blinks: "1" + "01" * (count - 1).
std::string word_pattern(std::size_t count);

}  // namespace blinkword
