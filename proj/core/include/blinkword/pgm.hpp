#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blinkword/frame.hpp"

namespace blinkword {

// Binary PGM ("P5", 80x70, maxval 255). Header comments are accepted on read.
std::vector<std::uint8_t> encode_pgm(const Frame& frame);
Frame decode_pgm(std::span<const std::uint8_t> bytes, std::int64_t timestamp_ms = 0,
                 std::size_t index = 0);

Frame read_pgm(const std::filesystem::path& path, std::int64_t timestamp_ms = 0,
               std::size_t index = 0);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

// "frame_000042.pgm"
std::string stream_file_name(std::size_t index);

// Writes frames as frame_NNNNNN.pgm using each frame's index.
void write_stream_directory(const std::filesystem::path& dir,
                            std::span<const Frame> frames);

// Paths of frame_*.pgm files in `dir`, sorted by index.
std::vector<std::filesystem::path> list_stream_directory(
    const std::filesystem::path& dir);

}  // namespace blinkword
