#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "blinkword/dictionary.hpp"
#include "blinkword/frame.hpp"

namespace blinkword {

struct SessionStarted {
  std::size_t frame_index = 0;
  std::int64_t t_ms = 0;
  bool operator==(const SessionStarted&) const = default;
};

struct SessionEnded {
  std::size_t frame_index = 0;
  std::int64_t t_ms = 0;
  std::size_t discarded_blinks = 0;
  bool operator==(const SessionEnded&) const = default;
};

struct WordEmitted {
  std::size_t frame_index = 0;
  std::int64_t t_ms = 0;
  std::size_t blink_count = 0;
  std::string pattern;
  std::string token;
  bool operator==(const WordEmitted&) const = default;
};

struct UnknownPattern {
  std::size_t frame_index = 0;
  std::int64_t t_ms = 0;
  std::size_t blink_count = 0;
  bool operator==(const UnknownPattern&) const = default;
};

using DecodeEvent = std::variant<SessionStarted, SessionEnded, WordEmitted, UnknownPattern>;

std::int64_t event_time_ms(const DecodeEvent& event);
std::string describe(const DecodeEvent& event);

// Frame-count thresholds derived from a StreamConfig.
struct FrameThresholds {
  std::int64_t min_closed = 0;
  std::int64_t word_gap = 0;
  std::int64_t session_toggle = 0;

  static FrameThresholds from(const StreamConfig& config);
  bool operator==(const FrameThresholds&) const = default;
};

struct DecoderState {
  FrameThresholds thresholds;
  bool session_active = false;
  // Length of the current Closed run; 0 after an Open frame.
  std::int64_t closed_run = 0;
  // Frames since the last confirmed closure ended, counting sub-threshold
  // closures as Open.
  std::int64_t open_run = 0;
  // The current Closed run already toggled the session.
  bool run_toggled = false;
  std::size_t pending_blinks = 0;
  std::optional<std::size_t> last_frame_index;

  static DecoderState initial(const StreamConfig& config);
  bool operator==(const DecoderState&) const = default;
};

// One transition of the blink state machine. Pure: the input state is not
// modified. A frame index not greater than the previous one is a
// SequencingError.
std::pair<DecoderState, std::vector<DecodeEvent>> step(DecoderState state,
                                                       const StateEvent& event,
                                                       const Dictionary& dict);

// Owning wrapper for streaming use.
class Decoder {
 public:
  Decoder(const StreamConfig& config, Dictionary dict);

  // Appends any events produced by `event` to `out`.
  void push(const StateEvent& event, std::vector<DecodeEvent>& out);
  std::vector<DecodeEvent> push(const StateEvent& event);

  const DecoderState& state() const noexcept { return state_; }
  void set_state(DecoderState state) { state_ = std::move(state); }
  const Dictionary& dictionary() const noexcept { return dict_; }

 private:
  DecoderState state_;
  Dictionary dict_;
};

std::vector<DecodeEvent> decode_stream(std::span<const StateEvent> events,
                                       const StreamConfig& config,
                                       const Dictionary& dict);

}  // namespace blinkword
