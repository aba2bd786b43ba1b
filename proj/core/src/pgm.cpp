#include "blinkword/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>

#include "blinkword/errors.hpp"

namespace blinkword {
namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 65535) throw ParseError(std::string("PGM ") + what + " too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("PGM: expected ") + what, start);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_pgm(const Frame& frame) {
  char header[32];
  const int n = std::snprintf(header, sizeof header, "P5\n%d %d\n255\n", frame.width(),
                              frame.height());
  const auto header_len = static_cast<std::size_t>(n);
  std::vector<std::uint8_t> out(header_len + kFramePixels);
  std::copy_n(header, header_len, out.begin());
  std::copy(frame.pixels().begin(), frame.pixels().end(), out.begin() + n);
  return out;
}

Frame decode_pgm(std::span<const std::uint8_t> bytes, std::int64_t timestamp_ms,
                 std::size_t index) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError("not a binary PGM (missing P5 magic)", 0);
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
    throw ParseError("PGM: expected whitespace after maxval", reader.pos());
  }
  reader.advance(1);
  if (width != kFrameWidth || height != kFrameHeight) {
    throw SchemaError("PGM is " + std::to_string(width) + "x" + std::to_string(height) +
                      ", expected 80x70");
  }
  if (maxval != 255) throw SchemaError("PGM maxval must be 255");
  const std::size_t body = reader.pos();
  if (bytes.size() - body < kFramePixels) {
    throw ParseError("PGM: truncated pixel data", bytes.size());
  }
  std::vector<std::uint8_t> pixels(bytes.begin() + body, bytes.begin() + body + kFramePixels);
  return Frame(std::move(pixels), timestamp_ms, index);
}

Frame read_pgm(const std::filesystem::path& path, std::int64_t timestamp_ms,
               std::size_t index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StreamError("cannot open " + path.string(), index);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes, timestamp_ms, index);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte_offset());
  }
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StreamError("cannot write " + path.string(), frame.index());
  const auto bytes = encode_pgm(frame);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw StreamError("short write to " + path.string(), frame.index());
}

std::string stream_file_name(std::size_t index) {
  char name[32];
  std::snprintf(name, sizeof name, "frame_%06zu.pgm", index);
  return name;
}

void write_stream_directory(const std::filesystem::path& dir, std::span<const Frame> frames) {
  std::filesystem::create_directories(dir);
  for (const auto& frame : frames) write_pgm(dir / stream_file_name(frame.index()), frame);
}

std::vector<std::filesystem::path> list_stream_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw StreamError("not a directory: " + dir.string(), 0);
  }
  static const std::regex kName(R"(frame_(\d+)\.pgm)");
  std::vector<std::pair<std::size_t, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, kName)) {
      found.emplace_back(std::stoull(m[1].str()), entry.path());
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::filesystem::path> paths;
  paths.reserve(found.size());
  for (auto& [_, p] : found) paths.push_back(std::move(p));
  return paths;
}

}  // namespace blinkword
