#include "blinkword/dictionary.hpp"

#include <fstream>
#include <sstream>

#include "blinkword/errors.hpp"
#include "json.hpp"

namespace blinkword {
namespace {

std::map<std::size_t, std::string> builtin(DictionaryMode mode) {
  switch (mode) {
    case DictionaryMode::kWords:
      return {{1, "Yes"},  {2, "No"},     {3, "Hi"},          {4, "I am"},
              {5, "Good"}, {6, "Thanks"}, {7, "How are you?"}};
    case DictionaryMode::kMouse:
      return {{1, "Right"}, {2, "Left"}, {3, "Click R."},  {4, "Click L."},
              {5, "Up"},    {6, "Down"}, {7, "Hold click"}};
    case DictionaryMode::kKeyboard:
      return {{1, "Tab"},       {2, "Enter"},       {3, "Back"}, {4, "Esc"},
              {5, "Scroll up"}, {6, "Scroll down"}, {7, "Space"}};
  }
  return {};
}

}  // namespace

std::string_view to_string(DictionaryMode mode) noexcept {
  switch (mode) {
    case DictionaryMode::kWords:
      return "words";
    case DictionaryMode::kMouse:
      return "mouse";
    case DictionaryMode::kKeyboard:
      return "keyboard";
  }
  return "words";
}

DictionaryMode dictionary_mode_from_string(std::string_view s) {
  if (s == "words") return DictionaryMode::kWords;
  if (s == "mouse") return DictionaryMode::kMouse;
  if (s == "keyboard") return DictionaryMode::kKeyboard;
  throw ArgumentError("unknown dictionary mode '" + std::string(s) + "'");
}

Dictionary::Dictionary(DictionaryMode mode) : mode_(mode), entries_(builtin(mode)) {}

Dictionary::Dictionary(DictionaryMode mode, std::map<std::size_t, std::string> entries)
    : mode_(mode), entries_(std::move(entries)) {
  if (entries_.contains(0)) throw ArgumentError("dictionary keys must be positive");
}

Dictionary Dictionary::parse(const std::string& text, DictionaryMode mode) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed dictionary: ") + e.what(), e.byte);
  }
  const std::string key(to_string(mode));
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_object()) {
    throw SchemaError("dictionary has no '" + key + "' table");
  }
  std::map<std::size_t, std::string> entries;
  for (const auto& [count, token] : doc[key].items()) {
    std::size_t parsed = 0;
    std::size_t used = 0;
    try {
      parsed = std::stoul(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || parsed == 0) {
      throw SchemaError("dictionary key '" + count + "' is not a positive integer");
    }
    if (!token.is_string()) throw SchemaError("dictionary token for " + count + " must be text");
    entries.emplace(parsed, token.get<std::string>());
  }
  return Dictionary(mode, std::move(entries));
}

Dictionary Dictionary::load(const std::filesystem::path& path, DictionaryMode mode) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dictionary " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), mode);
}

std::optional<std::string> Dictionary::lookup(std::size_t count) const {
  if (count == 0) throw ArgumentError("lookup needs a blink count of at least 1");
  const auto it = entries_.find(count);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> lookup(std::size_t count, const Dictionary& dict) {
  return dict.lookup(count);
}

}  // namespace blinkword
