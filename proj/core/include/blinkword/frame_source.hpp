#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "blinkword/dataset.hpp"
#include "blinkword/frame.hpp"

namespace blinkword {

// Pull-based producer of frames in strictly increasing index order.
// nullopt marks end of stream.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<Frame> next() = 0;
  // True for sources fed by a real-time producer.
  virtual bool is_live() const { return false; }
};

// frame_NNNNNN.pgm files of a directory, in index order.
class DirectorySource final : public FrameSource {
 public:
  explicit DirectorySource(const std::filesystem::path& dir);
  std::optional<Frame> next() override;
  std::size_t size() const noexcept { return paths_.size(); }

 private:
  std::vector<std::filesystem::path> paths_;
  std::size_t cursor_ = 0;
};

struct ScriptSegment {
  EyeState state = EyeState::kOpen;
  std::int64_t duration_ms = 0;
  bool operator==(const ScriptSegment&) const = default;
};

// One segment per line: "<open|closed> <duration_ms>"; '#' starts a comment.
std::vector<ScriptSegment> parse_script(const std::string& text);
std::vector<ScriptSegment> load_script(const std::filesystem::path& path);

// Ground-truth state of every frame the script renders at `fps`. Each
// segment lasts frames_for_duration(duration_ms, fps) frames.
std::vector<EyeState> script_states(const std::vector<ScriptSegment>& script, int fps);

// Renders a script through the synthetic eye generator.
class ScriptSource final : public FrameSource {
 public:
  ScriptSource(std::vector<ScriptSegment> script, int fps, std::uint64_t seed = 42,
               SyntheticParams params = {});
  std::optional<Frame> next() override;
  const std::vector<EyeState>& states() const noexcept { return states_; }

 private:
  std::vector<EyeState> states_;
  int fps_;
  std::mt19937_64 rng_;
  SyntheticParams params_;
  std::size_t cursor_ = 0;
};

// Raw 5600-byte frames read back to back from a byte stream (e.g. a capture
// process piped to stdin). A trailing partial frame is a StreamError.
class LiveSource final : public FrameSource {
 public:
  explicit LiveSource(std::istream& in);
  std::optional<Frame> next() override;
  bool is_live() const override { return true; }

 private:
  std::istream& in_;
  std::size_t index_ = 0;
};

// Wraps any source so the pipeline treats it as a live feed.
class PacedSource final : public FrameSource {
 public:
  explicit PacedSource(std::unique_ptr<FrameSource> inner) : inner_(std::move(inner)) {}
  std::optional<Frame> next() override { return inner_->next(); }
  bool is_live() const override { return true; }

 private:
  std::unique_ptr<FrameSource> inner_;
};

}  // namespace blinkword
