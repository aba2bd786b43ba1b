#include "blinkword/pattern.hpp"

#include <algorithm>

#include "blinkword/errors.hpp"

namespace blinkword {

std::string normalize(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    if (c != '0' && c != '1') {
      throw ArgumentError(std::string("pattern may only contain '0' and '1', found '") + c +
                          "'");
    }
    if (out.empty() || out.back() != c) out.push_back(c);
  }
  return out;
}

bool is_normalized(std::string_view pattern) noexcept {
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] != '0' && pattern[i] != '1') return false;
    if (i > 0 && pattern[i] == pattern[i - 1]) return false;
  }
  return true;
}

std::size_t blink_count(std::string_view pattern) {
  if (!is_normalized(pattern)) {
    throw ArgumentError("blink_count expects a normalized pattern, got '" +
                        std::string(pattern) + "'");
  }
  return static_cast<std::size_t>(std::count(pattern.begin(), pattern.end(), '1'));
}

std::string word_pattern(std::size_t count) {
  if (count == 0) throw ArgumentError("a word has at least one blink");
  std::string out = "1";
  for (std::size_t i = 1; i < count; ++i) out += "01";
  return out;
}

}  // namespace blinkword
