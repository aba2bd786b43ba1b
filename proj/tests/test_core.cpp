#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "blinkword/errors.hpp"
#include "blinkword/frame.hpp"
#include "blinkword/pgm.hpp"
#include "doctest.h"
#include "support.hpp"

namespace bw = blinkword;
using testing::uniform_frame;

TEST_CASE("frames_for_duration at 10 fps") {
  CHECK(bw::frames_for_duration(200, 10) == 2);
  CHECK(bw::frames_for_duration(1000, 10) == 10);
  CHECK(bw::frames_for_duration(4000, 10) == 40);
  CHECK(bw::frames_for_duration(1, 10) == 1);
  CHECK(bw::frames_for_duration(101, 10) == 2);
}

TEST_CASE("frames_for_duration rejects non-positive input") {
  CHECK_THROWS_AS(bw::frames_for_duration(0, 10), bw::ArgumentError);
  CHECK_THROWS_AS(bw::frames_for_duration(-5, 10), bw::ArgumentError);
  CHECK_THROWS_AS(bw::frames_for_duration(100, 0), bw::ArgumentError);
}

TEST_CASE("frames_for_duration is monotone in duration and fps") {
  for (int fps : {1, 5, 10, 24, 30, 60}) {
    std::int64_t prev = 0;
    for (std::int64_t d = 1; d <= 5000; ++d) {
      const auto n = bw::frames_for_duration(d, fps);
      CHECK(n >= prev);
      prev = n;
    }
  }
  for (std::int64_t d : {1, 99, 200, 1000, 4000}) {
    std::int64_t prev = 0;
    for (int fps = 1; fps <= 120; ++fps) {
      const auto n = bw::frames_for_duration(d, fps);
      CHECK(n >= prev);
      prev = n;
    }
  }
}

TEST_CASE("frames_for_duration round-trips whole frame periods") {
  for (int fps : {1, 2, 4, 5, 8, 10, 20, 25, 40, 50, 100}) {
    const std::int64_t period = 1000 / fps;
    for (std::int64_t k = 1; k <= 200; ++k) {
      CHECK(bw::frames_for_duration(k * period, fps) == k);
    }
  }
}

TEST_CASE("frame geometry is enforced") {
  CHECK_THROWS_AS(bw::Frame(std::vector<std::uint8_t>(5599), 0, 0), bw::ArgumentError);
  CHECK_THROWS_AS(bw::Frame(std::vector<std::uint8_t>(70 * 81), 0, 0), bw::ArgumentError);
  const auto f = uniform_frame(7);
  CHECK(f.width() == 80);
  CHECK(f.height() == 70);
  CHECK(f.pixels().size() == 5600);
}

TEST_CASE("frame pixel addressing is row-major, 80 wide") {
  std::vector<std::uint8_t> px(bw::kFramePixels, 0);
  px[3 * 80 + 79] = 200;
  const bw::Frame f(px, 0, 0);
  CHECK(f.at(79, 3) == 200);
  CHECK(f.at(0, 4) == 0);
}

TEST_CASE("restamped keeps pixels") {
  const auto f = uniform_frame(9, 3);
  const auto g = f.restamped(1234, 17);
  CHECK(g.index() == 17);
  CHECK(g.timestamp_ms() == 1234);
  CHECK(std::ranges::equal(f.pixels(), g.pixels()));
}

TEST_CASE("eye state names") {
  CHECK(bw::to_string(bw::EyeState::kOpen) == "open");
  CHECK(bw::to_string(bw::EyeState::kClosed) == "closed");
  CHECK(bw::eye_state_from_string("closed") == bw::EyeState::kClosed);
  CHECK(bw::to_char(bw::EyeState::kClosed) == '1');
  CHECK(bw::to_char(bw::EyeState::kOpen) == '0');
  CHECK_THROWS_AS(bw::eye_state_from_string("shut"), bw::ArgumentError);
}

TEST_CASE("stream config validation") {
  bw::StreamConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.frame_period_ms() == doctest::Approx(100.0));

  auto bad = c;
  bad.fps = 0;
  CHECK_THROWS_AS(bad.validate(), bw::ArgumentError);
  bad = c;
  bad.word_gap_ms = 5000;
  CHECK_THROWS_AS(bad.validate(), bw::ArgumentError);
  bad = c;
  bad.min_closed_ms = 1000;
  CHECK_THROWS_AS(bad.validate(), bw::ArgumentError);
  bad = c;
  bad.fps = 5;  // 200 ms period over a 100 ms budget
  CHECK_THROWS_AS(bad.validate(), bw::ArgumentError);
  bad = c;
  bad.latency_budget_ms = 0;
  CHECK_THROWS_AS(bad.validate(), bw::ArgumentError);
}

TEST_CASE("replay timestamps") {
  CHECK(bw::replay_timestamp_ms(0, 10) == 0);
  CHECK(bw::replay_timestamp_ms(39, 10) == 3900);
  CHECK(bw::replay_timestamp_ms(3, 30) == 100);
}

TEST_CASE("pgm round trip") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto f = testing::random_frame(rng, i);
    const auto bytes = bw::encode_pgm(f);
    const auto g = bw::decode_pgm(bytes, f.timestamp_ms(), f.index());
    CHECK(g == f);
    CHECK(g.width() == 80);
    CHECK(g.height() == 70);
  }
}

TEST_CASE("pgm header") {
  const auto bytes = bw::encode_pgm(uniform_frame(5));
  const std::string head(bytes.begin(), bytes.begin() + 2);
  CHECK(head == "P5");
  CHECK(bytes.size() > bw::kFramePixels);
}

TEST_CASE("pgm decoder accepts comments and rejects other geometry") {
  std::string header = "P5\n# made by hand\n80 70\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.resize(bytes.size() + bw::kFramePixels, 42);
  CHECK(bw::decode_pgm(bytes).at(10, 10) == 42);

  std::string wrong = "P5\n70 80\n255\n";
  std::vector<std::uint8_t> w(wrong.begin(), wrong.end());
  w.resize(w.size() + bw::kFramePixels, 0);
  CHECK_THROWS_AS(bw::decode_pgm(w), bw::Error);

  std::string ascii = "P2\n80 70\n255\n";
  std::vector<std::uint8_t> a(ascii.begin(), ascii.end());
  CHECK_THROWS_AS(bw::decode_pgm(a), bw::ParseError);

  auto truncated = bw::encode_pgm(uniform_frame(1));
  truncated.resize(truncated.size() - 10);
  CHECK_THROWS_AS(bw::decode_pgm(truncated), bw::ParseError);
}

TEST_CASE("stream directories list frames in index order") {
  const auto dir = std::filesystem::temp_directory_path() / "blinkword_test_core_stream";
  std::filesystem::remove_all(dir);
  std::vector<bw::Frame> frames;
  for (std::size_t i : {0u, 2u, 10u, 1u}) frames.push_back(uniform_frame(static_cast<std::uint8_t>(i), i));
  bw::write_stream_directory(dir, frames);
  std::filesystem::create_directories(dir / "sub");
  { std::ofstream(dir / "notes.txt") << "x"; }

  const auto paths = bw::list_stream_directory(dir);
  REQUIRE(paths.size() == 4);
  CHECK(paths[0].filename() == "frame_000000.pgm");
  CHECK(paths[1].filename() == "frame_000001.pgm");
  CHECK(paths[3].filename() == "frame_000010.pgm");
  CHECK(bw::read_pgm(paths[3]).at(0, 0) == 10);
  CHECK(bw::stream_file_name(42) == "frame_000042.pgm");
  std::filesystem::remove_all(dir);
}
