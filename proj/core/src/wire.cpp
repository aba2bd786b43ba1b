#include "blinkword/wire.hpp"

#include "json_codec.hpp"

namespace blinkword {
namespace {

using codec::json;

struct Encoder {
  json operator()(const StateMessage& m) const {
    return {{"type", "state"}, {"payload", codec::encode_state(m.state)}};
  }
  json operator()(const EventMessage& m) const {
    return {{"type", "event"}, {"payload", codec::encode_event(m.event)}};
  }
  json operator()(const ConfigMessage& m) const {
    return {{"type", "config"}, {"payload", codec::encode_config(m.config)}};
  }
  json operator()(const SimStateMessage& m) const {
    return {{"type", "sim_state"},
            {"payload", {{"state", std::string(to_string(m.state))}, {"t_ms", m.t_ms}}}};
  }
  json operator()(const ErrorMessage& m) const {
    return {{"type", "error"}, {"payload", {{"message", m.message}}}};
  }
};

}  // namespace

std::string serialize(const WireMessage& message) {
  return std::visit(Encoder{}, message).dump();
}

std::string wire_type(const WireMessage& message) {
  return std::visit(Encoder{}, message).at("type").get<std::string>();
}

WireMessage parse_wire(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed message: ") + e.what(), e.byte);
  }
  try {
    if (!doc.is_object()) throw SchemaError("message must be an object");
    const auto type = doc.at("type").get<std::string>();
    const auto& payload = doc.at("payload");
    if (type == "state") return StateMessage{codec::decode_state(payload)};
    if (type == "event") return EventMessage{codec::decode_event(payload)};
    if (type == "config") return ConfigMessage{codec::decode_config(payload)};
    if (type == "sim_state") {
      return SimStateMessage{eye_state_from_string(payload.at("state").get<std::string>()),
                             payload.at("t_ms").get<std::int64_t>()};
    }
    if (type == "error") return ErrorMessage{payload.at("message").get<std::string>()};
    throw SchemaError("unknown message type '" + type + "'");
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid message: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("invalid message: ") + e.what());
  }
}

}  // namespace blinkword
