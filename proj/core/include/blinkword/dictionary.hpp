#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace blinkword {

enum class DictionaryMode { kWords, kMouse, kKeyboard };

std::string_view to_string(DictionaryMode mode) noexcept;
DictionaryMode dictionary_mode_from_string(std::string_view s);

// Blink count -> output token for one mode.
class Dictionary {
 public:
  // Built-in table for `mode`.
  explicit Dictionary(DictionaryMode mode = DictionaryMode::kWords);
  Dictionary(DictionaryMode mode, std::map<std::size_t, std::string> entries);

  // Reads `mode` from a document of the form
  //   {"words": {"1": "Yes", ...}, "mouse": {...}, "keyboard": {...}}
  static Dictionary load(const std::filesystem::path& path, DictionaryMode mode);
  static Dictionary parse(const std::string& text, DictionaryMode mode);

  DictionaryMode mode() const noexcept { return mode_; }
  const std::map<std::size_t, std::string>& entries() const noexcept {
    return entries_;
  }

  // Token for `count`, or nullopt when absent. count == 0 is an ArgumentError.
  std::optional<std::string> lookup(std::size_t count) const;

  bool operator==(const Dictionary&) const = default;

 private:
  DictionaryMode mode_;
  std::map<std::size_t, std::string> entries_;
};

std::optional<std::string> lookup(std::size_t count, const Dictionary& dict);

}  // namespace blinkword
