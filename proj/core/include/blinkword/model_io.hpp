#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <variant>

#include "blinkword/heuristic.hpp"
#include "blinkword/tinynet.hpp"

namespace blinkword {

inline constexpr int kModelFormatVersion = 1;

using Model = std::variant<TinyNet, HeuristicModel>;

std::string serialize_model(const Model& model);
// ParseError (with byte offset) on malformed text, SchemaError on an unknown
// version/kind or mismatched dimensions.
Model parse_model(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

std::unique_ptr<Classifier> make_classifier(Model model);

}  // namespace blinkword
