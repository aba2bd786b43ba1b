#include "blinkword/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "blinkword/bounded_queue.hpp"
#include "blinkword/errors.hpp"

namespace blinkword {
namespace {

using Clock = std::chrono::steady_clock;

StateEvent classify_frame(const Frame& frame, const Classifier& classifier) {
  const auto start = Clock::now();
  double confidence;
  try {
    confidence = classifier.classify(frame);
  } catch (const std::exception& e) {
    throw StreamError(std::string("classifier failed: ") + e.what(), frame.index());
  }
  const std::chrono::duration<double, std::milli> elapsed = Clock::now() - start;
  StateEvent event;
  event.frame_index = frame.index();
  event.timestamp_ms = frame.timestamp_ms();
  event.confidence = confidence;
  event.classify_latency_ms = elapsed.count();
  try {
    event.state = decide(confidence);
  } catch (const ArgumentError& e) {
    throw StreamError(e.what(), frame.index());
  }
  return event;
}

std::optional<Frame> pull(FrameSource& source, std::size_t expected_index) {
  try {
    return source.next();
  } catch (const StreamError&) {
    throw;
  } catch (const std::exception& e) {
    throw StreamError(e.what(), expected_index);
  }
}

class Collector {
 public:
  Collector(const StreamConfig& config, const Dictionary& dict, const PipelineSink& sink,
            PipelineReport& report)
      : decoder_(config, dict), sink_(sink), report_(report) {}

  void accept(const StateEvent& state) {
    latencies_.push_back(state.classify_latency_ms);
    report_.states.push_back(state);
    if (sink_.on_state) sink_.on_state(state);
    scratch_.clear();
    decoder_.push(state, scratch_);
    for (const auto& e : scratch_) {
      report_.events.push_back(e);
      if (sink_.on_event) sink_.on_event(e);
    }
  }

  std::vector<double> take_latencies() { return std::move(latencies_); }

 private:
  Decoder decoder_;
  const PipelineSink& sink_;
  PipelineReport& report_;
  std::vector<double> latencies_;
  std::vector<DecodeEvent> scratch_;
};

void run_replay(FrameSource& source, const Classifier& classifier, const StreamConfig& config,
                Collector& collector, PipelineReport& report) {
  std::optional<std::size_t> previous;
  while (auto frame = pull(source, previous ? *previous + 1 : 0)) {
    if (previous && frame->index() <= *previous) {
      throw StreamError("source delivered frames out of order", frame->index());
    }
    previous = frame->index();
    ++report.frames_captured;
    const Frame stamped =
        frame->restamped(replay_timestamp_ms(frame->index(), config.fps), frame->index());
    collector.accept(classify_frame(stamped, classifier));
  }
}

void run_live(FrameSource& source, const Classifier& classifier, const StreamConfig& config,
              const PipelineOptions& options, Collector& collector, PipelineReport& report) {
  const std::size_t depth = options.capture_queue_depth == 0
                                ? static_cast<std::size_t>(config.fps)
                                : options.capture_queue_depth;
  BoundedQueue<Frame> capture_queue(depth);
  BoundedQueue<StateEvent> decode_queue(options.decode_queue_depth);
  std::atomic<bool> stop{false};
  std::mutex error_mu;
  std::exception_ptr error;
  auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mu);
      if (!error) error = e;
    }
    stop = true;
    capture_queue.close();
    decode_queue.close();
  };

  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double, std::milli>(config.frame_period_ms()));
  std::size_t captured = 0;

  std::thread capture([&] {
    try {
      const auto start = Clock::now();
      std::optional<std::size_t> previous;
      for (std::size_t tick = 0; !stop; ++tick) {
        std::this_thread::sleep_until(start + tick * period);
        auto frame = pull(source, previous ? *previous + 1 : 0);
        if (!frame) break;
        if (previous && frame->index() <= *previous) {
          throw StreamError("source delivered frames out of order", frame->index());
        }
        previous = frame->index();
        const auto now_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        ++captured;
        capture_queue.push_drop_oldest(frame->restamped(now_ms, frame->index()));
      }
      // The feed is over: anything still waiting is stale.
      capture_queue.close_and_discard();
    } catch (...) {
      fail(std::current_exception());
    }
  });

  std::thread classify([&] {
    try {
      while (auto frame = capture_queue.pop()) {
        decode_queue.push_wait(classify_frame(*frame, classifier));
      }
      decode_queue.close();
    } catch (...) {
      fail(std::current_exception());
    }
  });

  try {
    while (auto state = decode_queue.pop()) collector.accept(*state);
  } catch (...) {
    fail(std::current_exception());
    // Unblock a producer waiting on a full queue.
    while (decode_queue.pop()) {
    }
  }
  capture.join();
  classify.join();
  if (error) std::rethrow_exception(error);

  report.frames_captured = captured;
  report.dropped_frames = capture_queue.dropped();
  report.queue_high_water = {capture_queue.high_water(), decode_queue.high_water()};
}

}  // namespace

PipelineReport run_pipeline(FrameSource& source, const Classifier& classifier,
                            const StreamConfig& config, const Dictionary& dict,
                            const PipelineSink& sink, const PipelineOptions& options) {
  config.validate();
  PipelineReport report;
  Collector collector(config, dict, sink, report);
  const bool live = options.mode == PipelineMode::kLive ||
                    (options.mode == PipelineMode::kAuto && source.is_live());
  if (live) {
    run_live(source, classifier, config, options, collector, report);
  } else {
    run_replay(source, classifier, config, collector, report);
  }
  report.latency = summarize_latencies(collector.take_latencies(), config.latency_budget_ms);
  return report;
}

}  // namespace blinkword
