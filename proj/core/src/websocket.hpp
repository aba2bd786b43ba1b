#pragma once

// Minimal RFC 6455 pieces the gateway needs: the opening handshake and
// unfragmented-or-continued text frames.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace blinkword::ws {

enum class Opcode : std::uint8_t {
  kContinuation = 0x0,
  kText = 0x1,
  kBinary = 0x2,
  kClose = 0x8,
  kPing = 0x9,
  kPong = 0xA,
};

// base64(SHA-1(key + GUID))
std::string accept_key(std::string_view client_key);

// Value of the Sec-WebSocket-Key header in an HTTP request head, if present.
std::optional<std::string> find_client_key(std::string_view request_head);

std::string handshake_response(std::string_view client_key);

// Unmasked single frame (server to client). Set `mask` to produce a masked
// client frame instead.
std::string encode_frame(Opcode opcode, std::string_view payload,
                         std::optional<std::uint32_t> mask = std::nullopt);

struct Message {
  Opcode opcode;
  std::string payload;
};

// Accumulates bytes and yields complete messages; continuation frames are
// joined onto the message they continue.
class FrameDecoder {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  // Throws std::runtime_error on a protocol violation.
  std::optional<Message> next();

 private:
  std::string buffer_;
  std::optional<Message> partial_;
};

}  // namespace blinkword::ws
