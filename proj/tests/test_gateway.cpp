#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <random>
#include <string>
#include <thread>

#include "blinkword/decoder.hpp"
#include "blinkword/errors.hpp"
#include "blinkword/gateway.hpp"
#include "blinkword/pattern.hpp"
#include "blinkword/wire.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "websocket.hpp"

namespace bw = blinkword;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

const bw::Dictionary kWords{bw::DictionaryMode::kWords};

// Blocking loopback client speaking either raw lines or WebSocket frames.
class TestClient {
 public:
  explicit TestClient(std::uint16_t port, bool websocket = false) : websocket_(websocket) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    if (websocket_) handshake();
  }
  ~TestClient() { ::close(fd_); }
  TestClient(const TestClient&) = delete;
  TestClient& operator=(const TestClient&) = delete;

  void send_line(const std::string& line) {
    if (websocket_) {
      send_raw(bw::ws::encode_frame(bw::ws::Opcode::kText, line, 0x12345678u));
    } else {
      send_raw(line + "\n");
    }
  }

  void send_raw(const std::string& bytes) {
    REQUIRE(::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL) ==
            static_cast<ssize_t>(bytes.size()));
  }

  // Next inbound document, or nullopt after `timeout` / on close.
  std::optional<std::string> read_line(std::chrono::milliseconds timeout = 3000ms) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (true) {
      if (auto line = pop()) return line;
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left <= 0ms) return std::nullopt;
      pollfd pfd{fd_, POLLIN, 0};
      if (::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) return std::nullopt;
      char chunk[65536];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) {
        closed_ = true;
        return pop();
      }
      if (websocket_) frames_.feed(std::string_view(chunk, static_cast<std::size_t>(n)));
      else buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  bw::WireMessage read_message(std::chrono::milliseconds timeout = 3000ms) {
    auto line = read_line(timeout);
    REQUIRE(line.has_value());
    return bw::parse_wire(*line);
  }

  // Reads until an event satisfying `pred` arrives; returns every message read.
  template <class Pred>
  std::vector<bw::WireMessage> read_until(Pred pred, std::chrono::milliseconds timeout = 5000ms) {
    std::vector<bw::WireMessage> seen;
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
      auto line = read_line(std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now()));
      if (!line) break;
      seen.push_back(bw::parse_wire(*line));
      if (pred(seen.back())) break;
    }
    return seen;
  }

  bool closed() const { return closed_; }
  std::string handshake_reply;

 private:
  void handshake() {
    send_raw("GET /stream HTTP/1.1\r\nHost: localhost\r\nUpgrade: websocket\r\n"
             "Connection: Upgrade\r\nSec-WebSocket-Key: dGhlIHNhbXBsZSBub25jZQ==\r\n"
             "Sec-WebSocket-Version: 13\r\n\r\n");
    std::string head;
    while (head.find("\r\n\r\n") == std::string::npos) {
      char c;
      REQUIRE(::recv(fd_, &c, 1, 0) == 1);
      head.push_back(c);
    }
    handshake_reply = head;
  }

  std::optional<std::string> pop() {
    if (websocket_) {
      while (auto m = frames_.next()) {
        if (m->opcode == bw::ws::Opcode::kText) return m->payload;
      }
      return std::nullopt;
    }
    const auto nl = buffer_.find('\n');
    if (nl == std::string::npos) return std::nullopt;
    std::string line = buffer_.substr(0, nl);
    buffer_.erase(0, nl + 1);
    return line;
  }

  int fd_ = -1;
  bool websocket_;
  bool closed_ = false;
  std::string buffer_;
  bw::ws::FrameDecoder frames_;
};

bool is_word(const bw::WireMessage& m) {
  const auto* e = std::get_if<bw::EventMessage>(&m);
  return e && std::holds_alternative<bw::WordEmitted>(e->event);
}

std::string sim(const char* state, std::int64_t t) {
  return bw::serialize(bw::SimStateMessage{bw::eye_state_from_string(state), t});
}

// 40 closed, 1 open, three 2-frame blinks, then the 1 s gap.
std::vector<std::string> hi_sequence() {
  std::string trace = std::string(40, 'C') + "O" + "CCOCCOCC" + std::string(10, 'O');
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    lines.push_back(sim(trace[i] == 'C' ? "closed" : "open", static_cast<std::int64_t>(i) * 100));
  }
  return lines;
}

bw::GatewayOptions options(bool simulated, bool pace = false) {
  bw::GatewayOptions o;
  o.dict = kWords;
  o.simulated = simulated;
  o.pace_simulated = pace;
  return o;
}

bw::WireMessage random_message(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 7);
  std::uniform_int_distribution<std::int64_t> t(0, 1'000'000'000);
  std::uniform_int_distribution<std::size_t> idx(0, 1'000'000);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> blinks(1, 12);
  const auto i = idx(rng);
  const auto ts = t(rng);
  switch (kind(rng)) {
    case 0:
      return bw::StateMessage{{i, ts, unit(rng) < 0.5 ? bw::EyeState::kOpen : bw::EyeState::kClosed,
                               unit(rng), unit(rng) * 200.0}};
    case 1: return bw::EventMessage{bw::SessionStarted{i, ts}};
    case 2: return bw::EventMessage{bw::SessionEnded{i, ts, blinks(rng)}};
    case 3: {
      const auto n = blinks(rng);
      return bw::EventMessage{bw::WordEmitted{i, ts, n, bw::word_pattern(n), "tok \"" + std::to_string(n) + "\" é"}};
    }
    case 4: return bw::EventMessage{bw::UnknownPattern{i, ts, blinks(rng)}};
    case 5: {
      bw::StreamConfig c;
      c.fps = static_cast<int>(blinks(rng)) * 10;
      c.latency_budget_ms = 100.0 + unit(rng);
      return bw::ConfigMessage{c};
    }
    case 6: return bw::SimStateMessage{unit(rng) < 0.5 ? bw::EyeState::kOpen : bw::EyeState::kClosed, ts};
    default: return bw::ErrorMessage{"bad \n line\t" + std::to_string(i)};
  }
}

}  // namespace

TEST_CASE("wire round trip") {
  std::mt19937_64 rng(404);
  for (int i = 0; i < 5000; ++i) {
    const auto m = random_message(rng);
    const auto line = bw::serialize(m);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(bw::parse_wire(line) == m);
  }
}

TEST_CASE("wire field names") {
  const auto state = json::parse(bw::serialize(bw::StateMessage{{7, 700, bw::EyeState::kClosed, 0.75, 1.5}}));
  CHECK(state["type"] == "state");
  CHECK(state["payload"]["frame_index"] == 7);
  CHECK(state["payload"]["t_ms"] == 700);
  CHECK(state["payload"]["state"] == "closed");
  CHECK(state["payload"]["confidence"] == 0.75);
  CHECK(state["payload"]["latency_ms"] == 1.5);

  const auto word = json::parse(bw::serialize(bw::EventMessage{bw::WordEmitted{9, 900, 3, "10101", "Hi"}}));
  CHECK(word["type"] == "event");
  CHECK(word["payload"]["kind"] == "word_emitted");
  CHECK(word["payload"]["blink_count"] == 3);
  CHECK(word["payload"]["pattern"] == "10101");
  CHECK(word["payload"]["token"] == "Hi");

  const auto ended = json::parse(bw::serialize(bw::EventMessage{bw::SessionEnded{1, 2, 4}}));
  CHECK(ended["payload"]["kind"] == "session_ended");
  CHECK(ended["payload"]["discarded_blinks"] == 4);

  const auto config = json::parse(bw::serialize(bw::ConfigMessage{{}}));
  CHECK(config["type"] == "config");
  CHECK(config["payload"]["fps"] == 10);
  CHECK(config["payload"]["session_toggle_ms"] == 4000);

  CHECK(bw::wire_type(bw::SimStateMessage{}) == "sim_state");
  CHECK(bw::wire_type(bw::ErrorMessage{}) == "error");
}

TEST_CASE("wire errors") {
  CHECK_THROWS_AS(bw::parse_wire("{\"type\": "), bw::ParseError);
  CHECK_THROWS_AS(bw::parse_wire("not json"), bw::ParseError);
  CHECK_THROWS_AS(bw::parse_wire(R"({"type": "telemetry", "payload": {}})"), bw::SchemaError);
  CHECK_THROWS_AS(bw::parse_wire(R"({"type": "sim_state", "payload": {"state": "closed"}})"),
                  bw::SchemaError);
  CHECK_THROWS_AS(bw::parse_wire(R"({"type": "sim_state", "payload": {"state": "blink", "t_ms": 1}})"),
                  bw::SchemaError);
  CHECK_THROWS_AS(bw::parse_wire(R"({"type": "event", "payload": {"kind": "party", "frame_index": 1, "t_ms": 1}})"),
                  bw::SchemaError);
  CHECK_THROWS_AS(bw::parse_wire("[1, 2]"), bw::SchemaError);
}

TEST_CASE("websocket handshake key") {
  CHECK(bw::ws::accept_key("dGhlIHNhbXBsZSBub25jZQ==") == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
  CHECK(bw::ws::find_client_key("GET / HTTP/1.1\r\nsec-websocket-key:  abc== \r\n") == "abc==");
  CHECK_FALSE(bw::ws::find_client_key("GET / HTTP/1.1\r\nHost: x\r\n").has_value());
}

TEST_CASE("websocket framing round trip") {
  std::mt19937_64 rng(5);
  for (std::size_t len : {0u, 1u, 125u, 126u, 127u, 65535u, 65536u, 70000u}) {
    std::string payload(len, 'x');
    for (auto& c : payload) c = static_cast<char>(rng());
    for (bool masked : {false, true}) {
      bw::ws::FrameDecoder d;
      const auto bytes = bw::ws::encode_frame(bw::ws::Opcode::kText, payload,
                                              masked ? std::optional<std::uint32_t>(0xA1B2C3D4u)
                                                     : std::nullopt);
      // Byte-at-a-time feeding for small frames exercises partial headers.
      if (len < 200) {
        for (char c : bytes) d.feed(std::string_view(&c, 1));
      } else {
        d.feed(bytes);
      }
      const auto m = d.next();
      REQUIRE(m.has_value());
      CHECK(m->payload == payload);
      CHECK_FALSE(d.next().has_value());
    }
  }
}

TEST_CASE("bind addresses") {
  CHECK(bw::parse_bind_address("127.0.0.1:8765") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 8765});
  CHECK(bw::parse_bind_address("localhost:0").second == 0);
  CHECK_THROWS_AS(bw::parse_bind_address("8765"), bw::ArgumentError);
  CHECK_THROWS_AS(bw::parse_bind_address("host:99999"), bw::ArgumentError);
  CHECK_THROWS_AS(bw::parse_bind_address("host:http"), bw::ArgumentError);
}

TEST_CASE("bind failure is a startup error") {
  bw::Gateway first(options(false));
  first.start();
  auto o = options(false);
  o.port = first.port();
  bw::Gateway second(o);
  CHECK_THROWS_AS(second.start(), bw::StartupError);
  auto bad = options(false);
  bad.host = "256.1.1.1";
  bw::Gateway third(bad);
  CHECK_THROWS_AS(third.start(), bw::StartupError);
}

TEST_CASE("clients get config first and no history") {
  bw::Gateway gw(options(false));
  gw.start();
  gw.publish_state({0, 0, bw::EyeState::kOpen, 0.1, 1.0});
  TestClient c(gw.port());
  c.send_line("");  // end the protocol sniff early
  const auto first = c.read_message();
  REQUIRE(std::holds_alternative<bw::ConfigMessage>(first));
  CHECK(std::get<bw::ConfigMessage>(first).config == bw::StreamConfig{});
  gw.publish_state({1, 100, bw::EyeState::kClosed, 0.9, 1.0});
  const auto second = c.read_message();
  REQUIRE(std::holds_alternative<bw::StateMessage>(second));
  CHECK(std::get<bw::StateMessage>(second).state.frame_index == 1);
}

TEST_CASE("a silent raw client is registered after the sniff window") {
  bw::Gateway gw(options(false));
  gw.start();
  TestClient c(gw.port());
  const auto first = c.read_message();
  CHECK(std::holds_alternative<bw::ConfigMessage>(first));
}

TEST_CASE("malformed input gets an error reply and the connection stays usable") {
  bw::Gateway gw(options(true));
  gw.start();
  TestClient c(gw.port());
  c.send_line("{oops");
  CHECK(std::holds_alternative<bw::ConfigMessage>(c.read_message()));
  const auto err = c.read_message();
  REQUIRE(std::holds_alternative<bw::ErrorMessage>(err));
  c.send_line(R"({"type": "state", "payload": {}})");
  CHECK(std::holds_alternative<bw::ErrorMessage>(c.read_message()));
  c.send_line(sim("closed", 0));
  const auto state = c.read_message();
  REQUIRE(std::holds_alternative<bw::StateMessage>(state));
  CHECK(std::get<bw::StateMessage>(state).state.state == bw::EyeState::kClosed);
  CHECK(std::get<bw::StateMessage>(state).state.confidence == 1.0);
  // Time must move forward.
  c.send_line(sim("open", 0));
  CHECK(std::holds_alternative<bw::ErrorMessage>(c.read_message()));
}

TEST_CASE("a gateway without simulated input rejects sim_state") {
  bw::Gateway gw(options(false));
  gw.start();
  TestClient c(gw.port());
  c.send_line(sim("closed", 0));
  CHECK(std::holds_alternative<bw::ConfigMessage>(c.read_message()));
  CHECK(std::holds_alternative<bw::ErrorMessage>(c.read_message()));
}

TEST_CASE("simulated blinks produce Hi, same as decode_stream") {
  bw::Gateway gw(options(true));
  gw.start();
  TestClient c(gw.port());
  for (const auto& line : hi_sequence()) c.send_line(line);
  const auto seen = c.read_until(is_word);
  REQUIRE(!seen.empty());
  CHECK(std::holds_alternative<bw::ConfigMessage>(seen.front()));
  REQUIRE(is_word(seen.back()));
  const auto& word = std::get<bw::WordEmitted>(std::get<bw::EventMessage>(seen.back()).event);
  CHECK(word.token == "Hi");
  CHECK(word.pattern == "10101");

  std::vector<bw::StateEvent> states;
  std::vector<bw::DecodeEvent> events;
  for (const auto& m : gw.broadcast_log()) {
    if (const auto* s = std::get_if<bw::StateMessage>(&m)) states.push_back(s->state);
    if (const auto* e = std::get_if<bw::EventMessage>(&m)) events.push_back(e->event);
  }
  CHECK(states.size() == hi_sequence().size());
  CHECK(events == bw::decode_stream(states, {}, kWords));
  CHECK(events.size() == 2);
}

TEST_CASE("paced simulation keeps the frame cadence") {
  auto o = options(true, true);
  o.config.fps = 50;
  o.config.min_closed_ms = 40;
  o.config.word_gap_ms = 200;
  o.config.session_toggle_ms = 800;
  bw::Gateway gw(o);
  gw.start();
  TestClient c(gw.port());
  const auto lines = hi_sequence();
  const auto start = std::chrono::steady_clock::now();
  for (const auto& line : lines) c.send_line(line);
  const auto seen = c.read_until(is_word);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  REQUIRE(is_word(seen.back()));
  // 62 frames at 20 ms each.
  CHECK(elapsed >= 1000ms);
  CHECK(elapsed < 3000ms);
}

TEST_CASE("websocket clients see the same stream as raw clients") {
  bw::Gateway gw(options(true));
  gw.start();
  TestClient ws(gw.port(), true);
  CHECK(ws.handshake_reply.find("101 Switching Protocols") != std::string::npos);
  CHECK(ws.handshake_reply.find("s3pPLMBiTxaQ9kYGzzhZRbK+xOo=") != std::string::npos);
  TestClient raw(gw.port());
  raw.send_line("");
  CHECK(std::holds_alternative<bw::ConfigMessage>(ws.read_message()));
  CHECK(std::holds_alternative<bw::ConfigMessage>(raw.read_message()));
  while (gw.client_count() < 2) std::this_thread::sleep_for(5ms);

  for (const auto& line : hi_sequence()) ws.send_line(line);
  const auto via_ws = ws.read_until(is_word);
  const auto via_raw = raw.read_until(is_word);
  CHECK(via_ws == via_raw);
  REQUIRE(!via_ws.empty());
  CHECK(is_word(via_ws.back()));
}

TEST_CASE("websocket ping and close") {
  bw::Gateway gw(options(false));
  gw.start();
  TestClient ws(gw.port(), true);
  CHECK(std::holds_alternative<bw::ConfigMessage>(ws.read_message()));
  ws.send_raw(bw::ws::encode_frame(bw::ws::Opcode::kClose, "", 0x01020304u));
  CHECK_FALSE(ws.read_line(2000ms).has_value());
  CHECK(ws.closed());
}

TEST_CASE("a GET without a key is refused") {
  bw::Gateway gw(options(false));
  gw.start();
  TestClient c(gw.port());
  c.send_raw("GET / HTTP/1.1\r\nHost: x\r\n\r\n");
  const auto reply = c.read_line();
  REQUIRE(reply.has_value());
  CHECK(reply->find("400") != std::string::npos);
}

TEST_CASE("broadcast consistency across clients") {
  bw::Gateway gw(options(false));
  gw.start();
  std::vector<std::unique_ptr<TestClient>> clients;
  for (int i = 0; i < 3; ++i) {
    clients.push_back(std::make_unique<TestClient>(gw.port(), i == 1));
    if (i != 1) clients.back()->send_line("");
    CHECK(std::holds_alternative<bw::ConfigMessage>(clients.back()->read_message()));
  }
  while (gw.client_count() < 3) std::this_thread::sleep_for(5ms);

  std::mt19937_64 rng(77);
  std::vector<bw::WireMessage> sent;
  for (int i = 0; i < 500; ++i) {
    auto m = random_message(rng);
    if (std::holds_alternative<bw::SimStateMessage>(m)) continue;
    sent.push_back(m);
    gw.publish(m);
  }
  for (auto& c : clients) {
    std::vector<bw::WireMessage> got;
    while (got.size() < sent.size()) {
      auto line = c->read_line();
      REQUIRE(line.has_value());
      got.push_back(bw::parse_wire(*line));
    }
    CHECK(got == sent);
  }
}

TEST_CASE("a client that stops reading is disconnected") {
  auto o = options(false);
  o.client_queue_limit = 8;
  bw::Gateway gw(o);
  gw.start();
  TestClient stalled(gw.port());
  stalled.send_line("");
  while (gw.client_count() < 1) std::this_thread::sleep_for(5ms);

  const bw::StateMessage big{{0, 0, bw::EyeState::kOpen, 0.123456789, 1.0}};
  const auto deadline = std::chrono::steady_clock::now() + 20s;
  std::size_t published = 0;
  while (gw.client_count() > 0 && std::chrono::steady_clock::now() < deadline) {
    for (int i = 0; i < 1000; ++i) gw.publish(big);
    published += 1000;
  }
  INFO("published " << published);
  CHECK(gw.client_count() == 0);
  // The broadcaster itself never blocked and new clients are still served.
  TestClient fresh(gw.port());
  fresh.send_line("");
  CHECK(std::holds_alternative<bw::ConfigMessage>(fresh.read_message()));
}

TEST_CASE("stop closes client connections") {
  bw::Gateway gw(options(false));
  gw.start();
  TestClient c(gw.port());
  c.send_line("");
  CHECK(std::holds_alternative<bw::ConfigMessage>(c.read_message()));
  gw.stop();
  CHECK_FALSE(c.read_line(2000ms).has_value());
  CHECK(c.closed());
}
