#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "blinkword/classifier.hpp"
#include "blinkword/decoder.hpp"
#include "blinkword/dictionary.hpp"
#include "blinkword/frame.hpp"
#include "blinkword/frame_source.hpp"
#include "blinkword/latency.hpp"

namespace blinkword {

// Receives pipeline output as it happens. Calls arrive from the decode stage
// only, in frame order.
struct PipelineSink {
  std::function<void(const StateEvent&)> on_state;
  std::function<void(const DecodeEvent&)> on_event;
};

struct QueueHighWater {
  std::size_t capture = 0;
  std::size_t decode = 0;
};

struct PipelineReport {
  LatencyStats latency;
  std::vector<StateEvent> states;
  std::vector<DecodeEvent> events;
  QueueHighWater queue_high_water;
  std::size_t dropped_frames = 0;
  std::size_t frames_captured = 0;
};

enum class PipelineMode {
  // Follow the source: live sources are paced and threaded, others replayed.
  kAuto,
  // Pull-based, single-threaded, timestamps derived from the frame index.
  kReplay,
  // Capture / classify / decode threads; capture paced at the frame period
  // and timestamps taken from a monotonic clock.
  kLive,
};

struct PipelineOptions {
  PipelineMode mode = PipelineMode::kAuto;
  // Live mode: capture queue depth; 0 means fps.
  std::size_t capture_queue_depth = 0;
  std::size_t decode_queue_depth = 64;
};

// Classify every frame, time the call, decode, forward to the sink.
// A classifier error is rethrown as StreamError naming the frame index.
PipelineReport run_pipeline(FrameSource& source, const Classifier& classifier,
                            const StreamConfig& config, const Dictionary& dict,
                            const PipelineSink& sink = {},
                            const PipelineOptions& options = {});

}  // namespace blinkword
