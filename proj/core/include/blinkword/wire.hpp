#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "blinkword/decoder.hpp"
#include "blinkword/frame.hpp"

namespace blinkword {

// Newline-delimited {"type": ..., "payload": {...}} documents.
//
//   state     {frame_index, t_ms, state: "open"|"closed", confidence, latency_ms}
//   event     {kind, frame_index, t_ms, [blink_count, pattern, token,
//              discarded_blinks]}
//   config    {fps, latency_budget_ms, min_closed_ms, word_gap_ms,
//              session_toggle_ms}
//   sim_state {state, t_ms}                       (client -> gateway)
//   error     {message}                           (reply to a bad inbound line)
struct StateMessage {
  StateEvent state;
  bool operator==(const StateMessage&) const = default;
};
struct EventMessage {
  DecodeEvent event;
  bool operator==(const EventMessage&) const = default;
};
struct ConfigMessage {
  StreamConfig config;
  bool operator==(const ConfigMessage&) const = default;
};
struct SimStateMessage {
  EyeState state = EyeState::kOpen;
  std::int64_t t_ms = 0;
  bool operator==(const SimStateMessage&) const = default;
};
struct ErrorMessage {
  std::string message;
  bool operator==(const ErrorMessage&) const = default;
};

using WireMessage =
    std::variant<StateMessage, EventMessage, ConfigMessage, SimStateMessage, ErrorMessage>;

// One line without the trailing newline.
std::string serialize(const WireMessage& message);
// ParseError for malformed text, SchemaError for a missing/unknown field.
WireMessage parse_wire(const std::string& line);

std::string wire_type(const WireMessage& message);

}  // namespace blinkword
