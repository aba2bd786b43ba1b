#pragma once

// nlohmann encoders shared by the wire protocol and report writers.

#include <string>

#include "blinkword/decoder.hpp"
#include "blinkword/errors.hpp"
#include "blinkword/frame.hpp"
#include "blinkword/latency.hpp"
#include "json.hpp"

namespace blinkword::codec {

using nlohmann::json;

inline json encode_state(const StateEvent& s) {
  return {{"frame_index", s.frame_index},
          {"t_ms", s.timestamp_ms},
          {"state", std::string(to_string(s.state))},
          {"confidence", s.confidence},
          {"latency_ms", s.classify_latency_ms}};
}

inline StateEvent decode_state(const json& j) {
  StateEvent s;
  s.frame_index = j.at("frame_index").get<std::size_t>();
  s.timestamp_ms = j.at("t_ms").get<std::int64_t>();
  s.state = eye_state_from_string(j.at("state").get<std::string>());
  s.confidence = j.at("confidence").get<double>();
  s.classify_latency_ms = j.at("latency_ms").get<double>();
  return s;
}

inline json encode_event(const DecodeEvent& event) {
  struct Visitor {
    json operator()(const SessionStarted& e) const {
      return {{"kind", "session_started"}, {"frame_index", e.frame_index}, {"t_ms", e.t_ms}};
    }
    json operator()(const SessionEnded& e) const {
      return {{"kind", "session_ended"},
              {"frame_index", e.frame_index},
              {"t_ms", e.t_ms},
              {"discarded_blinks", e.discarded_blinks}};
    }
    json operator()(const WordEmitted& e) const {
      return {{"kind", "word_emitted"}, {"frame_index", e.frame_index},
              {"t_ms", e.t_ms},         {"blink_count", e.blink_count},
              {"pattern", e.pattern},   {"token", e.token}};
    }
    json operator()(const UnknownPattern& e) const {
      return {{"kind", "unknown_pattern"},
              {"frame_index", e.frame_index},
              {"t_ms", e.t_ms},
              {"blink_count", e.blink_count}};
    }
  };
  return std::visit(Visitor{}, event);
}

inline DecodeEvent decode_event(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto index = j.at("frame_index").get<std::size_t>();
  const auto t = j.at("t_ms").get<std::int64_t>();
  if (kind == "session_started") return SessionStarted{index, t};
  if (kind == "session_ended") {
    return SessionEnded{index, t, j.at("discarded_blinks").get<std::size_t>()};
  }
  if (kind == "word_emitted") {
    return WordEmitted{index, t, j.at("blink_count").get<std::size_t>(),
                       j.at("pattern").get<std::string>(), j.at("token").get<std::string>()};
  }
  if (kind == "unknown_pattern") {
    return UnknownPattern{index, t, j.at("blink_count").get<std::size_t>()};
  }
  throw SchemaError("unknown event kind '" + kind + "'");
}

inline json encode_config(const StreamConfig& c) {
  return {{"fps", c.fps},
          {"latency_budget_ms", c.latency_budget_ms},
          {"min_closed_ms", c.min_closed_ms},
          {"word_gap_ms", c.word_gap_ms},
          {"session_toggle_ms", c.session_toggle_ms}};
}

inline StreamConfig decode_config(const json& j) {
  StreamConfig c;
  c.fps = j.at("fps").get<int>();
  c.latency_budget_ms = j.at("latency_budget_ms").get<double>();
  c.min_closed_ms = j.at("min_closed_ms").get<std::int64_t>();
  c.word_gap_ms = j.at("word_gap_ms").get<std::int64_t>();
  c.session_toggle_ms = j.at("session_toggle_ms").get<std::int64_t>();
  return c;
}

inline json encode_latency(const LatencyStats& s, bool with_samples) {
  json j = {{"mean_ms", s.mean_ms},         {"p50_ms", s.p50_ms},
            {"p95_ms", s.p95_ms},           {"p99_ms", s.p99_ms},
            {"max_ms", s.max_ms},           {"budget_ms", s.budget_ms},
            {"budget_violations", s.budget_violations},
            {"frames_total", s.frames_total}};
  if (with_samples) j["samples_ms"] = s.samples_ms;
  return j;
}

}  // namespace blinkword::codec
