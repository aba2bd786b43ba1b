#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace blinkword {

inline constexpr int kFrameWidth = 80;
inline constexpr int kFrameHeight = 70;
inline constexpr std::size_t kFramePixels =
    static_cast<std::size_t>(kFrameWidth) * kFrameHeight;

// One 80x70 grayscale eye crop, row-major, with its position in the stream.
// Immutable once built; the constructor rejects any other geometry.
class Frame {
 public:
  Frame(std::vector<std::uint8_t> pixels, std::int64_t timestamp_ms,
        std::size_t index);

  int width() const noexcept { return kFrameWidth; }
  int height() const noexcept { return kFrameHeight; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t at(int x, int y) const {
    return pixels_[static_cast<std::size_t>(y) * kFrameWidth + x];
  }
  std::int64_t timestamp_ms() const noexcept { return timestamp_ms_; }
  std::size_t index() const noexcept { return index_; }

  // Same pixels, new stream position.
  Frame restamped(std::int64_t timestamp_ms, std::size_t index) const;

  bool operator==(const Frame&) const = default;

 private:
  std::vector<std::uint8_t> pixels_;
  std::int64_t timestamp_ms_;
  std::size_t index_;
};

enum class EyeState : std::uint8_t { kOpen = 0, kClosed = 1 };

constexpr char to_char(EyeState s) noexcept {
  return s == EyeState::kClosed ? '1' : '0';
}
std::string_view to_string(EyeState s) noexcept;  // "open" / "closed"
EyeState eye_state_from_string(std::string_view s);

// Classifier verdict for one frame.
struct StateEvent {
  std::size_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  EyeState state = EyeState::kOpen;
  double confidence = 0.0;  // probability of Closed
  double classify_latency_ms = 0.0;

  bool operator==(const StateEvent&) const = default;
};

// Timing parameters of a stream. Thresholds stay in milliseconds; the decoder
// converts them per stream with frames_for_duration.
struct StreamConfig {
  int fps = 10;
  double latency_budget_ms = 100.0;
  std::int64_t min_closed_ms = 200;
  std::int64_t word_gap_ms = 1000;
  std::int64_t session_toggle_ms = 4000;

  // Throws ArgumentError naming the violated invariant.
  void validate() const;

  double frame_period_ms() const { return 1000.0 / fps; }

  bool operator==(const StreamConfig&) const = default;
};

// ceil(duration_ms * fps / 1000). Both arguments must be positive.
std::int64_t frames_for_duration(std::int64_t duration_ms, int fps);

// Replay timestamp of frame `index` at `fps`.
std::int64_t replay_timestamp_ms(std::size_t index, int fps);

}  // namespace blinkword
