#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blinkword/decoder.hpp"
#include "blinkword/dictionary.hpp"
#include "blinkword/frame.hpp"
#include "blinkword/wire.hpp"

namespace blinkword {

struct GatewayOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
  StreamConfig config;
  Dictionary dict;
  // Accept sim_state input and decode it.
  bool simulated = false;
  // Feed simulated states to the decoder one per frame period; when false
  // they are decoded as soon as they arrive.
  bool pace_simulated = true;
  // Outbound messages buffered per client before it is disconnected.
  std::size_t client_queue_limit = 4096;
};

// Splits "host:port". Throws ArgumentError.
std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& address);

// Broadcasts pipeline output to every connected client as newline-delimited
// documents over TCP. A client that opens with an HTTP GET is upgraded to a
// WebSocket and receives one document per text frame instead.
//
// Every new client first receives a "config" message, then live traffic; no
// history is replayed.
class Gateway {
 public:
  explicit Gateway(GatewayOptions options);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  // Binds and starts accepting. StartupError on bind/listen failure.
  void start();
  void stop();

  std::uint16_t port() const noexcept { return port_; }

  void publish(const WireMessage& message);
  void publish_state(const StateEvent& state) { publish(StateMessage{state}); }
  void publish_event(const DecodeEvent& event) { publish(EventMessage{event}); }

  // Every message broadcast so far, in order.
  std::vector<WireMessage> broadcast_log() const;
  std::size_t client_count() const;

 private:
  struct Client;
  struct SimInput;

  void accept_loop();
  void reader_loop(const std::shared_ptr<Client>& client);
  void writer_loop(const std::shared_ptr<Client>& client);
  void handle_line(const std::shared_ptr<Client>& client, const std::string& line);
  void simulation_loop();
  void enqueue(const std::shared_ptr<Client>& client, const std::string& line);
  void reap_finished_clients();

  GatewayOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::thread sim_thread_;

  mutable std::mutex clients_mu_;
  std::vector<std::shared_ptr<Client>> clients_;
  std::vector<WireMessage> log_;

  std::unique_ptr<SimInput> sim_;
};

}  // namespace blinkword
