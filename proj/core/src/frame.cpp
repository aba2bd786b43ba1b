#include "blinkword/frame.hpp"

#include <string>

#include "blinkword/errors.hpp"

namespace blinkword {

Frame::Frame(std::vector<std::uint8_t> pixels, std::int64_t timestamp_ms, std::size_t index)
    : pixels_(std::move(pixels)), timestamp_ms_(timestamp_ms), index_(index) {
  if (pixels_.size() != kFramePixels) {
    throw ArgumentError("frame must hold " + std::to_string(kFramePixels) +
                        " pixels (80x70), got " + std::to_string(pixels_.size()));
  }
  if (timestamp_ms_ < 0) {
    throw ArgumentError("frame timestamp must be non-negative");
  }
}

Frame Frame::restamped(std::int64_t timestamp_ms, std::size_t index) const {
  return Frame(pixels_, timestamp_ms, index);
}

std::string_view to_string(EyeState s) noexcept {
  return s == EyeState::kClosed ? "closed" : "open";
}

EyeState eye_state_from_string(std::string_view s) {
  if (s == "closed") return EyeState::kClosed;
  if (s == "open") return EyeState::kOpen;
  throw ArgumentError("unknown eye state '" + std::string(s) + "'");
}

void StreamConfig::validate() const {
  if (fps <= 0) throw ArgumentError("fps must be positive");
  if (!(latency_budget_ms > 0)) throw ArgumentError("latency budget must be positive");
  if (min_closed_ms <= 0 || word_gap_ms <= 0 || session_toggle_ms <= 0) {
    throw ArgumentError("timing thresholds must be positive");
  }
  if (!(session_toggle_ms > word_gap_ms && word_gap_ms > min_closed_ms)) {
    throw ArgumentError("thresholds must satisfy session_toggle > word_gap > min_closed");
  }
  if (frame_period_ms() > latency_budget_ms) {
    throw ArgumentError("frame period " + std::to_string(frame_period_ms()) +
                        " ms exceeds the latency budget");
  }
}

std::int64_t frames_for_duration(std::int64_t duration_ms, int fps) {
  if (duration_ms <= 0 || fps <= 0) {
    throw ArgumentError("frames_for_duration needs positive duration and fps");
  }
  const std::int64_t scaled = duration_ms * fps;
  return (scaled + 999) / 1000;
}

std::int64_t replay_timestamp_ms(std::size_t index, int fps) {
  return static_cast<std::int64_t>(index) * 1000 / fps;
}

}  // namespace blinkword
