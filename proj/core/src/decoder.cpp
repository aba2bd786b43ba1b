#include "blinkword/decoder.hpp"

#include "blinkword/errors.hpp"
#include "blinkword/pattern.hpp"

namespace blinkword {

std::int64_t event_time_ms(const DecodeEvent& event) {
  return std::visit([](const auto& e) { return e.t_ms; }, event);
}

std::string describe(const DecodeEvent& event) {
  struct Visitor {
    std::string operator()(const SessionStarted&) const { return "session started"; }
    std::string operator()(const SessionEnded& e) const {
      return "session ended (discarded " + std::to_string(e.discarded_blinks) + " blinks)";
    }
    std::string operator()(const WordEmitted& e) const {
      return "word \"" + e.token + "\" (" + std::to_string(e.blink_count) + " blinks, " +
             e.pattern + ")";
    }
    std::string operator()(const UnknownPattern& e) const {
      return "unknown pattern (" + std::to_string(e.blink_count) + " blinks)";
    }
  };
  return std::visit(Visitor{}, event);
}

FrameThresholds FrameThresholds::from(const StreamConfig& config) {
  if (config.fps <= 0) throw ArgumentError("fps must be positive");
  if (!(config.session_toggle_ms > config.word_gap_ms &&
        config.word_gap_ms > config.min_closed_ms && config.min_closed_ms > 0)) {
    throw ArgumentError("thresholds must satisfy session_toggle > word_gap > min_closed > 0");
  }
  return {frames_for_duration(config.min_closed_ms, config.fps),
          frames_for_duration(config.word_gap_ms, config.fps),
          frames_for_duration(config.session_toggle_ms, config.fps)};
}

DecoderState DecoderState::initial(const StreamConfig& config) {
  DecoderState state;
  state.thresholds = FrameThresholds::from(config);
  return state;
}

std::pair<DecoderState, std::vector<DecodeEvent>> step(DecoderState state,
                                                       const StateEvent& event,
                                                       const Dictionary& dict) {
  if (state.last_frame_index && event.frame_index <= *state.last_frame_index) {
    throw SequencingError("frame " + std::to_string(event.frame_index) + " arrived after frame " +
                          std::to_string(*state.last_frame_index));
  }
  state.last_frame_index = event.frame_index;

  std::vector<DecodeEvent> out;
  const auto& th = state.thresholds;

  if (event.state == EyeState::kClosed) {
    ++state.closed_run;
    if (state.closed_run == th.session_toggle && !state.run_toggled) {
      state.run_toggled = true;
      if (!state.session_active) {
        state.session_active = true;
        out.emplace_back(SessionStarted{event.frame_index, event.timestamp_ms});
      } else {
        out.emplace_back(
            SessionEnded{event.frame_index, event.timestamp_ms, state.pending_blinks});
        state.session_active = false;
        state.pending_blinks = 0;
      }
    }
    if (state.closed_run >= th.min_closed) {
      state.open_run = 0;
      return {std::move(state), std::move(out)};
    }
    // Too short to be a blink yet: counts as Open for the word gap.
    ++state.open_run;
  } else {
    if (state.closed_run > 0) {
      if (state.session_active && !state.run_toggled && state.closed_run >= th.min_closed) {
        ++state.pending_blinks;
      }
      state.closed_run = 0;
      state.run_toggled = false;
    }
    ++state.open_run;
  }

  if (state.session_active && state.pending_blinks > 0 && state.open_run >= th.word_gap) {
    const std::size_t count = state.pending_blinks;
    state.pending_blinks = 0;
    if (auto token = dict.lookup(count)) {
      out.emplace_back(WordEmitted{event.frame_index, event.timestamp_ms, count,
                                   word_pattern(count), std::move(*token)});
    } else {
      out.emplace_back(UnknownPattern{event.frame_index, event.timestamp_ms, count});
    }
  }
  return {std::move(state), std::move(out)};
}

Decoder::Decoder(const StreamConfig& config, Dictionary dict)
    : state_(DecoderState::initial(config)), dict_(std::move(dict)) {}

void Decoder::push(const StateEvent& event, std::vector<DecodeEvent>& out) {
  auto [next, events] = step(state_, event, dict_);
  state_ = std::move(next);
  for (auto& e : events) out.push_back(std::move(e));
}

std::vector<DecodeEvent> Decoder::push(const StateEvent& event) {
  std::vector<DecodeEvent> out;
  push(event, out);
  return out;
}

std::vector<DecodeEvent> decode_stream(std::span<const StateEvent> events,
                                       const StreamConfig& config, const Dictionary& dict) {
  Decoder decoder(config, dict);
  std::vector<DecodeEvent> out;
  for (const auto& e : events) decoder.push(e, out);
  return out;
}

}  // namespace blinkword
