#include "blinkword/model_io.hpp"

#include <fstream>
#include <sstream>

#include "blinkword/errors.hpp"
#include "json.hpp"

namespace blinkword {
namespace {

using nlohmann::json;

json encode(const TinyNet& net) {
  auto flat = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
  return json{{"format_version", kModelFormatVersion},
              {"kind", "tinynet"},
              {"dims",
               {{"input_dim", TinyNet::kInputDim},
                {"hidden_dim", net.hidden_dim()},
                {"output_dim", TinyNet::kOutputDim}}},
              {"decision_threshold", kDefaultDecisionThreshold},
              {"weights",
               {{"w1", flat(net.w1())},
                {"b1", flat(net.b1())},
                {"w2", flat(net.w2())},
                {"b2", flat(net.b2())}}}};
}

json encode(const HeuristicModel& model) {
  return json{{"format_version", kModelFormatVersion},
              {"kind", "heuristic"},
              {"decision_threshold", kDefaultDecisionThreshold},
              {"variance_threshold", model.variance_threshold()},
              {"slope", model.slope()}};
}

void copy_weights(const json& weights, const char* key, std::span<double> target) {
  const auto& arr = weights.at(key);
  if (!arr.is_array() || arr.size() != target.size()) {
    throw SchemaError(std::string("weights.") + key + " must hold " +
                      std::to_string(target.size()) + " values");
  }
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = arr[i].get<double>();
}

Model decode(const json& doc) {
  if (!doc.is_object()) throw SchemaError("model document must be an object");
  const int version = doc.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw SchemaError("unsupported model format_version " + std::to_string(version));
  }
  const auto kind = doc.at("kind").get<std::string>();
  if (kind == "heuristic") {
    return HeuristicModel(doc.at("variance_threshold").get<double>(),
                          doc.at("slope").get<double>());
  }
  if (kind != "tinynet") throw SchemaError("unknown model kind '" + kind + "'");

  const auto& dims = doc.at("dims");
  if (dims.at("input_dim").get<std::size_t>() != TinyNet::kInputDim ||
      dims.at("output_dim").get<std::size_t>() != TinyNet::kOutputDim) {
    throw SchemaError("model dimensions do not match 5600 -> 2");
  }
  TinyNet net(dims.at("hidden_dim").get<std::size_t>());
  const auto& weights = doc.at("weights");
  copy_weights(weights, "w1", net.w1());
  copy_weights(weights, "b1", net.b1());
  copy_weights(weights, "w2", net.w2());
  copy_weights(weights, "b2", net.b2());
  if (!net.all_finite()) throw SchemaError("model weights must be finite");
  return net;
}

}  // namespace

std::string serialize_model(const Model& model) {
  return std::visit([](const auto& m) { return encode(m).dump(); }, model) + "\n";
}

Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), e.byte);
  }
  try {
    return decode(doc);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid model document: ") + e.what());
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file " + path.string());
  out << serialize_model(model);
  if (!out) throw Error("short write to model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

std::unique_ptr<Classifier> make_classifier(Model model) {
  return std::visit(
      [](auto&& m) -> std::unique_ptr<Classifier> {
        using T = std::decay_t<decltype(m)>;
        return std::make_unique<T>(std::move(m));
      },
      std::move(model));
}

}  // namespace blinkword
