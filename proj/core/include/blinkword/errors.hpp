#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blinkword {

// Base of every error raised by the library. Callers that only need to
// distinguish "ours" from std failures catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced during a forward pass or training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A dataset does not satisfy what the operation needs (single class,
// batch larger than the set, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Well-formed document with the wrong shape: unknown version, missing
// field, dimension mismatch.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Events presented out of frame order.
class SequencingError : public Error {
 public:
  using Error::Error;
};

// Frame source failure. Carries the index of the frame being read.
class StreamError : public Error {
 public:
  StreamError(const std::string& what, std::size_t frame_index)
      : Error("frame " + std::to_string(frame_index) + ": " + what),
        frame_index_(frame_index) {}

  std::size_t frame_index() const noexcept { return frame_index_; }

 private:
  std::size_t frame_index_;
};

// No candidate satisfies the latency constraint.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double min_latency_ms)
      : Error(what), min_latency_ms_(min_latency_ms) {}

  double min_latency_ms() const noexcept { return min_latency_ms_; }

 private:
  double min_latency_ms_;
};

class StartupError : public Error {
 public:
  using Error::Error;
};

}  // namespace blinkword
