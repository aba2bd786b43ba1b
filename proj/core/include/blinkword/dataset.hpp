#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "blinkword/frame.hpp"

namespace blinkword {

struct LabeledFrame {
  Frame frame;
  EyeState label;

  bool operator==(const LabeledFrame&) const = default;
};

using LabeledSet = std::vector<LabeledFrame>;

// Knobs of the synthetic eye renderer. Defaults give classes that are
// separable by intensity variance.
struct SyntheticParams {
  double base_min = 20.0;
  double base_max = 60.0;
  double noise_stddev = 5.0;
  double sclera_min = 180.0;
  double sclera_max = 230.0;
  // Target sclera area as a fraction of the frame. Kept inside the nominal
  // 20-35 % band so rasterisation cannot push the drawn area outside it.
  double sclera_area_min = 0.21;
  double sclera_area_max = 0.34;
  double pupil_min = 0.0;
  double pupil_max = 20.0;
};

// Draws one frame of the requested state from `rng`. When `eye_pixels` is
// non-null it receives the number of pixels covered by the sclera ellipse
// (0 for a Closed frame).
Frame render_eye(EyeState state, std::mt19937_64& rng, const SyntheticParams& params,
                 std::int64_t timestamp_ms = 0, std::size_t index = 0,
                 std::size_t* eye_pixels = nullptr);

// `count_per_class` Closed frames followed by the same number of Open
// frames, interleaved Closed/Open. Deterministic per seed.
LabeledSet generate_synthetic(std::size_t count_per_class, std::uint64_t seed,
                              const SyntheticParams& params = {});

std::size_t count_label(std::span<const LabeledFrame> set, EyeState label);

// open/ and closed/ subdirectories of PGM frames.
void write_labeled_directory(const std::filesystem::path& dir,
                             std::span<const LabeledFrame> set);
LabeledSet read_labeled_directory(const std::filesystem::path& dir);

}  // namespace blinkword
