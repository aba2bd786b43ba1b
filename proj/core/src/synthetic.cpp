#include <algorithm>
#include <cmath>
#include <numbers>

#include "blinkword/dataset.hpp"
#include "blinkword/errors.hpp"
#include "blinkword/pgm.hpp"

namespace blinkword {

Frame render_eye(EyeState state, std::mt19937_64& rng, const SyntheticParams& params,
                 std::int64_t timestamp_ms, std::size_t index, std::size_t* eye_pixels) {
  using Uniform = std::uniform_real_distribution<double>;
  const double base = Uniform(params.base_min, params.base_max)(rng);
  std::vector<double> canvas(kFramePixels, base);
  std::size_t covered = 0;

  if (state == EyeState::kOpen) {
    const double area = Uniform(params.sclera_area_min, params.sclera_area_max)(rng) *
                        static_cast<double>(kFramePixels);
    const double aspect = Uniform(1.3, 1.8)(rng);
    const double semi_minor = std::sqrt(area / (std::numbers::pi * aspect));
    const double semi_major = aspect * semi_minor;
    const double cx = Uniform(semi_major, kFrameWidth - semi_major)(rng);
    const double cy = Uniform(semi_minor, kFrameHeight - semi_minor)(rng);
    const double sclera = Uniform(params.sclera_min, params.sclera_max)(rng);

    const double pupil_radius = Uniform(0.35, 0.6)(rng) * semi_minor;
    const double pupil_shift = 0.3 * (semi_major - pupil_radius);
    const double px = cx + Uniform(-pupil_shift, pupil_shift)(rng);
    const double pupil = Uniform(params.pupil_min, params.pupil_max)(rng);

    for (int y = 0; y < kFrameHeight; ++y) {
      for (int x = 0; x < kFrameWidth; ++x) {
        const double dx = (x + 0.5 - cx) / semi_major;
        const double dy = (y + 0.5 - cy) / semi_minor;
        if (dx * dx + dy * dy > 1.0) continue;
        ++covered;
        const double qx = x + 0.5 - px;
        const double qy = y + 0.5 - cy;
        canvas[static_cast<std::size_t>(y) * kFrameWidth + x] =
            qx * qx + qy * qy <= pupil_radius * pupil_radius ? pupil : sclera;
      }
    }
  }

  std::normal_distribution<double> noise(0.0, params.noise_stddev);
  std::vector<std::uint8_t> pixels(kFramePixels);
  for (std::size_t i = 0; i < kFramePixels; ++i) {
    const double v = std::clamp(canvas[i] + noise(rng), 0.0, 255.0);
    pixels[i] = static_cast<std::uint8_t>(std::lround(v));
  }
  if (eye_pixels != nullptr) *eye_pixels = covered;
  return Frame(std::move(pixels), timestamp_ms, index);
}

LabeledSet generate_synthetic(std::size_t count_per_class, std::uint64_t seed,
                              const SyntheticParams& params) {
  if (count_per_class == 0) throw ArgumentError("count per class must be at least 1");
  std::mt19937_64 rng(seed);
  LabeledSet set;
  set.reserve(2 * count_per_class);
  for (std::size_t i = 0; i < 2 * count_per_class; ++i) {
    const EyeState label = i % 2 == 0 ? EyeState::kClosed : EyeState::kOpen;
    set.push_back({render_eye(label, rng, params, static_cast<std::int64_t>(i) * 100, i),
                   label});
  }
  return set;
}

std::size_t count_label(std::span<const LabeledFrame> set, EyeState label) {
  return static_cast<std::size_t>(std::count_if(
      set.begin(), set.end(), [&](const LabeledFrame& f) { return f.label == label; }));
}

void write_labeled_directory(const std::filesystem::path& dir,
                             std::span<const LabeledFrame> set) {
  const auto open_dir = dir / "open";
  const auto closed_dir = dir / "closed";
  std::filesystem::create_directories(open_dir);
  std::filesystem::create_directories(closed_dir);
  for (const auto& item : set) {
    const auto& target = item.label == EyeState::kOpen ? open_dir : closed_dir;
    write_pgm(target / stream_file_name(item.frame.index()), item.frame);
  }
}

LabeledSet read_labeled_directory(const std::filesystem::path& dir) {
  LabeledSet set;
  std::size_t index = 0;
  for (const auto& [sub, label] : {std::pair{"closed", EyeState::kClosed},
                                   std::pair{"open", EyeState::kOpen}}) {
    const auto sub_dir = dir / sub;
    if (!std::filesystem::is_directory(sub_dir)) {
      throw DataError("labeled dataset is missing " + sub_dir.string());
    }
    for (const auto& path : list_stream_directory(sub_dir)) {
      set.push_back({read_pgm(path, static_cast<std::int64_t>(index) * 100, index), label});
      ++index;
    }
  }
  return set;
}

}  // namespace blinkword
