#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>

#include "blinkword/bounded_queue.hpp"
#include "blinkword/decoder.hpp"
#include "blinkword/errors.hpp"
#include "blinkword/frame_source.hpp"
#include "blinkword/heuristic.hpp"
#include "blinkword/latency.hpp"
#include "blinkword/pgm.hpp"
#include "blinkword/pipeline.hpp"
#include "doctest.h"
#include "support.hpp"

namespace bw = blinkword;
using namespace std::chrono_literals;

namespace {

const bw::Dictionary kWords{bw::DictionaryMode::kWords};
const bw::HeuristicModel kHeuristic;

std::vector<bw::Frame> hello_frames() {
  bw::DirectorySource src(testing::fixture("hello"));
  std::vector<bw::Frame> out;
  while (auto f = src.next()) out.push_back(std::move(*f));
  return out;
}

std::vector<bw::DecodeEvent> without_times(std::vector<bw::DecodeEvent> events) {
  for (auto& e : events) std::visit([](auto& v) { v.t_ms = 0; }, e);
  return events;
}

// Frame-for-frame the same rules as the default config, at 100 fps.
bw::StreamConfig fast_config() {
  bw::StreamConfig c;
  c.fps = 100;
  c.min_closed_ms = 20;
  c.word_gap_ms = 100;
  c.session_toggle_ms = 400;
  return c;
}

class ThrowingClassifier final : public bw::Classifier {
 public:
  double classify(const bw::Frame& f) const override {
    if (f.index() == 3) throw bw::NumericError("boom");
    return 0.0;
  }
  std::string name() const override { return "throwing"; }
};

class FailingSource final : public bw::FrameSource {
 public:
  std::optional<bw::Frame> next() override {
    if (n_ == 2) throw std::runtime_error("disk gone");
    return testing::uniform_frame(0, n_++);
  }

 private:
  std::size_t n_ = 0;
};

// Frames captured every `period`, a single worker taking `service` per frame,
// drop-oldest queue of `depth`, and whatever is queued when the feed ends is
// discarded. Returns the number of frames that never reach the classifier.
std::size_t simulate_drops(std::size_t frames, double period, double service, std::size_t depth) {
  std::deque<double> queue;  // arrival times
  std::size_t dropped = 0;
  double free_at = 0.0;
  for (std::size_t tick = 0; tick <= frames; ++tick) {
    const double now = static_cast<double>(tick) * period;
    while (!queue.empty() && free_at <= now) {
      free_at = std::max(free_at, queue.front()) + service;
      queue.pop_front();
    }
    if (tick == frames) return dropped + queue.size();
    if (queue.size() >= depth) {
      queue.pop_front();
      ++dropped;
    }
    queue.push_back(now);
    if (free_at <= now) {
      queue.pop_front();
      free_at = now + service;
    }
  }
  return dropped;
}

}  // namespace

TEST_CASE("percentiles use nearest rank") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
  CHECK(bw::percentile(v, 50) == 50.0);
  CHECK(bw::percentile(v, 95) == 95.0);
  CHECK(bw::percentile(v, 99) == 99.0);
  CHECK(bw::percentile(v, 100) == 100.0);
  CHECK(bw::percentile(std::vector<double>{7.0}, 1) == 7.0);
  CHECK_THROWS_AS(bw::percentile(v, 0), bw::ArgumentError);
}

TEST_CASE("latency stats are ordered and count the budget exactly") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> dist(0.05);
  for (int round = 0; round < 50; ++round) {
    std::vector<double> samples(1 + round * 7);
    for (auto& s : samples) s = dist(rng);
    const auto stats = bw::summarize_latencies(samples, 20.0);
    CHECK(stats.p50_ms <= stats.p95_ms);
    CHECK(stats.p95_ms <= stats.p99_ms);
    CHECK(stats.p99_ms <= stats.max_ms);
    const auto over = std::count_if(samples.begin(), samples.end(), [](double x) { return x > 20.0; });
    CHECK(stats.budget_violations == static_cast<std::size_t>(over));
    CHECK(stats.frames_total == samples.size());
  }
}

TEST_CASE("measure_latency of a 5 ms stub") {
  const testing::SleepyClassifier stub(kHeuristic, 5ms);
  const auto frames = hello_frames();
  const auto stats = bw::measure_latency(stub, std::span(frames).first(60));
  CHECK(stats.frames_total == 60);
  CHECK(stats.mean_ms >= 5.0);
  CHECK(stats.mean_ms <= 7.0);
  CHECK(stats.p50_ms <= stats.p95_ms);
  CHECK(stats.p95_ms <= stats.p99_ms);
}

TEST_CASE("measure_latency options") {
  const auto frames = hello_frames();
  bw::MeasureOptions opt;
  opt.repetitions = 3;
  opt.discard_first_repetition = true;
  CHECK(bw::measure_latency(kHeuristic, frames, opt).frames_total == 2 * frames.size());
  opt.repetitions = 0;
  CHECK_THROWS_AS(bw::measure_latency(kHeuristic, frames, opt), bw::ArgumentError);
  CHECK_THROWS_AS(bw::measure_latency(kHeuristic, {}, {}), bw::ArgumentError);
}

TEST_CASE("bounded queue") {
  bw::BoundedQueue<int> q(3);
  for (int i = 0; i < 5; ++i) q.push_drop_oldest(i);
  CHECK(q.size() == 3);
  CHECK(q.dropped() == 2);
  CHECK(q.high_water() == 3);
  CHECK(q.pop() == 2);
  q.close();
  q.push_drop_oldest(9);
  CHECK(q.pop() == 3);
  CHECK(q.pop() == 4);
  CHECK_FALSE(q.pop().has_value());

  bw::BoundedQueue<int> r(4);
  r.push_wait(1);
  r.push_wait(2);
  CHECK(r.close_and_discard() == 2);
  CHECK(r.dropped() == 2);
  CHECK_FALSE(r.pop().has_value());
}

TEST_CASE("directory source reads the hello fixture in order") {
  bw::DirectorySource src(testing::fixture("hello"));
  CHECK(src.size() == 134);
  std::size_t expected = 0;
  while (auto f = src.next()) CHECK(f->index() == expected++);
  CHECK(expected == 134);
  CHECK_THROWS_AS(bw::DirectorySource(testing::fixture("does-not-exist")), bw::Error);
}

TEST_CASE("script source renders frames the heuristic reads back") {
  bw::ScriptSource src(bw::load_script(testing::fixture("hello.script")), 10, 42);
  std::size_t i = 0;
  while (auto f = src.next()) {
    CHECK(bw::decide(kHeuristic.classify(*f)) == src.states()[i]);
    CHECK(f->timestamp_ms() == bw::replay_timestamp_ms(i, 10));
    ++i;
  }
  CHECK(i == src.states().size());
}

TEST_CASE("live source reads raw frames and rejects a partial one") {
  std::string bytes;
  for (int i = 0; i < 3; ++i) bytes += std::string(bw::kFramePixels, static_cast<char>(10 * i));
  std::istringstream in(bytes + "xyz");
  bw::LiveSource src(in);
  CHECK(src.is_live());
  for (int i = 0; i < 3; ++i) {
    auto f = src.next();
    REQUIRE(f);
    CHECK(f->index() == static_cast<std::size_t>(i));
    CHECK(f->at(5, 5) == 10 * i);
  }
  try {
    src.next();
    FAIL("expected a stream error");
  } catch (const bw::StreamError& e) {
    CHECK(e.frame_index() == 3);
  }
  std::istringstream empty;
  bw::LiveSource none(empty);
  CHECK_FALSE(none.next().has_value());
}

TEST_CASE("replay of the hello fixture equals decoding the ground truth") {
  const auto truth = bw::script_states(bw::load_script(testing::fixture("hello.script")), 10);
  std::vector<bw::StateEvent> states;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    states.push_back({i, bw::replay_timestamp_ms(i, 10), truth[i], 0.0, 0.0});
  }
  const auto expected = bw::decode_stream(states, {}, kWords);

  bw::DirectorySource src(testing::fixture("hello"));
  const auto report = bw::run_pipeline(src, kHeuristic, {}, kWords);
  CHECK(report.events == expected);
  CHECK(report.latency.frames_total == 134);
  CHECK(report.dropped_frames == 0);
  REQUIRE(report.states.size() == truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(report.states[i].state == truth[i]);
    CHECK(report.states[i].timestamp_ms == static_cast<std::int64_t>(i) * 100);
  }
  CHECK(bw::decode_stream(report.states, {}, kWords) == report.events);
}

TEST_CASE("replay is deterministic apart from latency") {
  auto run = [] {
    bw::DirectorySource src(testing::fixture("hello"));
    auto r = bw::run_pipeline(src, kHeuristic, {}, kWords);
    for (auto& s : r.states) s.classify_latency_ms = 0.0;
    return r;
  };
  const auto a = run();
  const auto b = run();
  CHECK(a.events == b.events);
  CHECK(a.states == b.states);
}

TEST_CASE("sink sees states and events in frame order") {
  std::vector<std::size_t> seen;
  std::vector<bw::DecodeEvent> events;
  bw::PipelineSink sink{[&](const bw::StateEvent& s) { seen.push_back(s.frame_index); },
                        [&](const bw::DecodeEvent& e) { events.push_back(e); }};
  bw::DirectorySource src(testing::fixture("hello"));
  const auto report = bw::run_pipeline(src, kHeuristic, {}, kWords, sink);
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(seen.size() == 134);
  CHECK(events == report.events);
}

TEST_CASE("empty source") {
  testing::VectorSource src({});
  const auto report = bw::run_pipeline(src, kHeuristic, {}, kWords);
  CHECK(report.latency.frames_total == 0);
  CHECK(report.events.empty());
  CHECK(report.states.empty());
}

TEST_CASE("a 150 ms classifier breaks a 100 ms budget on every frame") {
  const testing::SleepyClassifier slow(kHeuristic, 150ms);
  auto frames = hello_frames();
  frames.resize(5, frames.front());
  testing::VectorSource src(frames);
  const auto report = bw::run_pipeline(src, slow, {}, kWords);
  CHECK(report.latency.frames_total == 5);
  CHECK(report.latency.budget_violations == report.latency.frames_total);
  CHECK(report.dropped_frames == 0);
}

TEST_CASE("errors carry the frame index") {
  const ThrowingClassifier bad;
  testing::VectorSource src(hello_frames());
  try {
    bw::run_pipeline(src, bad, {}, kWords);
    FAIL("expected a stream error");
  } catch (const bw::StreamError& e) {
    CHECK(e.frame_index() == 3);
  }
  FailingSource failing;
  try {
    bw::run_pipeline(failing, kHeuristic, {}, kWords);
    FAIL("expected a stream error");
  } catch (const bw::StreamError& e) {
    CHECK(e.frame_index() == 2);
  }
  const testing::ConstantClassifier out_of_range(1.5);
  testing::VectorSource src2(hello_frames());
  CHECK_THROWS_AS(bw::run_pipeline(src2, out_of_range, {}, kWords), bw::StreamError);
}

TEST_CASE("live errors propagate") {
  const ThrowingClassifier bad;
  testing::VectorSource src(hello_frames(), true);
  CHECK_THROWS_AS(bw::run_pipeline(src, bad, fast_config(), kWords), bw::StreamError);
}

TEST_CASE("live mode with a fast classifier drops nothing and keeps order") {
  testing::VectorSource src(hello_frames(), true);
  const auto report = bw::run_pipeline(src, kHeuristic, fast_config(), kWords);
  CHECK(report.dropped_frames == 0);
  CHECK(report.frames_captured == 134);
  REQUIRE(report.states.size() == 134);
  for (std::size_t i = 0; i < report.states.size(); ++i) {
    CHECK(report.states[i].frame_index == i);
    if (i > 0) CHECK(report.states[i].timestamp_ms >= report.states[i - 1].timestamp_ms);
  }
  CHECK(report.queue_high_water.capture <= 100);

  testing::VectorSource replay(hello_frames());
  const auto expected = bw::run_pipeline(replay, kHeuristic, fast_config(), kWords);
  CHECK(without_times(report.events) == without_times(expected.events));
  CHECK(bw::decode_stream(report.states, fast_config(), kWords) == report.events);
}

TEST_CASE("queue simulation oracle") {
  CHECK(simulate_drops(100, 40.0, 20.0, 25) == 0);
  const auto d = simulate_drops(100, 40.0, 80.0, 25);
  CHECK(d >= 45);
  CHECK(d <= 55);
}

TEST_CASE("live mode with a classifier at twice the frame period drops about half") {
  bw::StreamConfig cfg;
  cfg.fps = 25;
  const testing::SleepyClassifier slow(kHeuristic, 80ms);
  auto frames = hello_frames();
  frames.resize(100, frames.front());
  for (std::size_t i = 0; i < frames.size(); ++i) frames[i] = frames[i].restamped(0, i);
  testing::VectorSource src(frames, true);
  const auto report = bw::run_pipeline(src, slow, cfg, kWords);
  const auto oracle = simulate_drops(100, 40.0, 80.0, 25);
  INFO("dropped " << report.dropped_frames << ", oracle " << oracle);
  CHECK(report.frames_captured == 100);
  CHECK(report.dropped_frames + report.states.size() == 100);
  CHECK(std::abs(static_cast<long>(report.dropped_frames) - 50) <= 5);
  CHECK(std::abs(static_cast<long>(report.dropped_frames) - static_cast<long>(oracle)) <= 5);
  CHECK(report.queue_high_water.capture <= 25);
  for (std::size_t i = 1; i < report.states.size(); ++i) {
    CHECK(report.states[i].frame_index > report.states[i - 1].frame_index);
  }
}

TEST_CASE("replay never drops, whatever the classifier speed") {
  const testing::SleepyClassifier slow(kHeuristic, 2ms);
  testing::VectorSource src(hello_frames());
  bw::PipelineOptions opt;
  opt.mode = bw::PipelineMode::kReplay;
  const auto report = bw::run_pipeline(src, slow, {}, kWords, {}, opt);
  CHECK(report.dropped_frames == 0);
  CHECK(report.states.size() == 134);
}

TEST_CASE("invalid config is rejected before work starts") {
  bw::StreamConfig cfg;
  cfg.word_gap_ms = 100;
  testing::VectorSource src(hello_frames());
  CHECK_THROWS_AS(bw::run_pipeline(src, kHeuristic, cfg, kWords), bw::ArgumentError);
}
