#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "blinkword/classifier.hpp"
#include "blinkword/dataset.hpp"
#include "blinkword/frame.hpp"
#include "blinkword/frame_source.hpp"

namespace testing {

namespace bw = blinkword;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(BLINKWORD_FIXTURES) / name;
}

inline bw::Frame uniform_frame(std::uint8_t value, std::size_t index = 0) {
  return bw::Frame(std::vector<std::uint8_t>(bw::kFramePixels, value),
                   static_cast<std::int64_t>(index) * 100, index);
}

inline bw::Frame random_frame(std::mt19937_64& rng, std::size_t index = 0) {
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> px(bw::kFramePixels);
  for (auto& p : px) p = static_cast<std::uint8_t>(byte(rng));
  return bw::Frame(std::move(px), 0, index);
}

// StateEvents at 10 fps from a string of 'O'/'C' (spaces ignored).
inline std::vector<bw::StateEvent> states_from(const std::string& trace, int fps = 10,
                                               std::size_t first_index = 0) {
  std::vector<bw::StateEvent> out;
  std::size_t index = first_index;
  for (char c : trace) {
    if (c == ' ') continue;
    bw::StateEvent e;
    e.frame_index = index;
    e.timestamp_ms = bw::replay_timestamp_ms(index, fps);
    e.state = c == 'C' ? bw::EyeState::kClosed : bw::EyeState::kOpen;
    e.confidence = c == 'C' ? 1.0 : 0.0;
    out.push_back(e);
    ++index;
  }
  return out;
}

inline std::string repeat(char c, std::size_t n) { return std::string(n, c); }

// Same confidence for every frame.
class ConstantClassifier final : public bw::Classifier {
 public:
  explicit ConstantClassifier(double confidence) : confidence_(confidence) {}
  double classify(const bw::Frame&) const override { return confidence_; }
  std::string name() const override { return "constant"; }

 private:
  double confidence_;
};

// Delegates to `inner` after sleeping for a fixed time.
class SleepyClassifier final : public bw::Classifier {
 public:
  SleepyClassifier(const bw::Classifier& inner, std::chrono::microseconds delay)
      : inner_(inner), delay_(delay) {}
  double classify(const bw::Frame& f) const override {
    std::this_thread::sleep_for(delay_);
    return inner_.classify(f);
  }
  std::string name() const override { return "sleepy"; }

 private:
  const bw::Classifier& inner_;
  std::chrono::microseconds delay_;
};

// Frames held in memory, delivered in order.
class VectorSource final : public bw::FrameSource {
 public:
  explicit VectorSource(std::vector<bw::Frame> frames, bool live = false)
      : frames_(std::move(frames)), live_(live) {}
  std::optional<bw::Frame> next() override {
    if (cursor_ >= frames_.size()) return std::nullopt;
    return frames_[cursor_++];
  }
  bool is_live() const override { return live_; }

 private:
  std::vector<bw::Frame> frames_;
  bool live_;
  std::size_t cursor_ = 0;
};

// Brute-force run collapse, one character at a time.
inline std::string collapse_oracle(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == 0 || s[i] != s[i - 1]) out.push_back(s[i]);
  }
  return out;
}

inline std::string random_bits(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::bernoulli_distribution bit(0.5);
  std::string s(len(rng), '0');
  for (auto& c : s) c = bit(rng) ? '1' : '0';
  return s;
}

// Runs a shell command, capturing stdout; returns the exit status.
inline int run_command(const std::string& cmd, std::string* out = nullptr) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  std::array<char, 4096> buf{};
  std::string text;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) text.append(buf.data(), n);
  const int status = pclose(pipe);
  if (out) *out = std::move(text);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace testing
