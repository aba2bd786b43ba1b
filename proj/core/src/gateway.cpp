#include "blinkword/gateway.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>

#include "blinkword/errors.hpp"
#include "websocket.hpp"

namespace blinkword {
namespace {

constexpr auto kProtocolSniffWindow = std::chrono::milliseconds(250);

bool send_all(int fd, std::string_view bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_bind_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
    throw ArgumentError("bind address must look like host:port, got '" + address + "'");
  }
  const std::string port_text = address.substr(colon + 1);
  std::size_t used = 0;
  unsigned long port = 0;
  try {
    port = std::stoul(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port > 65535) {
    throw ArgumentError("invalid port in bind address '" + address + "'");
  }
  return {address.substr(0, colon), static_cast<std::uint16_t>(port)};
}

struct Gateway::Client {
  explicit Client(int socket) : fd(socket) {}

  int fd;
  bool websocket = false;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> outbox;
  bool closed = false;
  std::atomic<bool> reader_done{false};
  std::atomic<bool> writer_done{false};
  std::thread reader;
  std::thread writer;

  void close() {
    {
      std::lock_guard lock(mu);
      if (closed) return;
      closed = true;
    }
    ::shutdown(fd, SHUT_RDWR);
    cv.notify_all();
  }
};

struct Gateway::SimInput {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<SimStateMessage> queue;
  std::optional<std::int64_t> last_t_ms;
  bool closed = false;
};

Gateway::Gateway(GatewayOptions options) : options_(std::move(options)) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  if (running_) return;
  options_.config.validate();

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  addrinfo* found = nullptr;
  const std::string port_text = std::to_string(options_.port);
  if (const int rc = ::getaddrinfo(options_.host.c_str(), port_text.c_str(), &hints, &found);
      rc != 0) {
    throw StartupError("cannot resolve " + options_.host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  std::string last_error = "no usable address";
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int yes = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) break;
    last_error = std::strerror(errno);
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) {
    throw StartupError("cannot bind " + options_.host + ":" + port_text + ": " + last_error);
  }

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.ss_family == AF_INET6
                    ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                    : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
  listen_fd_ = fd;
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  if (options_.simulated) {
    sim_ = std::make_unique<SimInput>();
    sim_thread_ = std::thread([this] { simulation_loop(); });
  }
}

void Gateway::stop() {
  if (!running_.exchange(false)) return;
  if (accept_thread_.joinable()) accept_thread_.join();
  ::close(listen_fd_);
  listen_fd_ = -1;

  if (sim_) {
    {
      std::lock_guard lock(sim_->mu);
      sim_->closed = true;
    }
    sim_->cv.notify_all();
    if (sim_thread_.joinable()) sim_thread_.join();
  }

  std::vector<std::shared_ptr<Client>> clients;
  {
    std::lock_guard lock(clients_mu_);
    clients.swap(clients_);
  }
  for (auto& c : clients) c->close();
  for (auto& c : clients) {
    if (c->reader.joinable()) c->reader.join();
    if (c->writer.joinable()) c->writer.join();
    ::close(c->fd);
  }
}

void Gateway::accept_loop() {
  while (running_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    reap_finished_clients();
    auto client = std::make_shared<Client>(fd);
    std::lock_guard lock(clients_mu_);
    clients_.push_back(client);
    client->reader = std::thread([this, client] { reader_loop(client); });
  }
}

void Gateway::reap_finished_clients() {
  std::vector<std::shared_ptr<Client>> finished;
  {
    std::lock_guard lock(clients_mu_);
    auto it = std::stable_partition(clients_.begin(), clients_.end(), [](const auto& c) {
      return !(c->reader_done && (c->writer_done || !c->writer.joinable()));
    });
    finished.assign(it, clients_.end());
    clients_.erase(it, clients_.end());
  }
  for (auto& c : finished) {
    if (c->reader.joinable()) c->reader.join();
    if (c->writer.joinable()) c->writer.join();
    ::close(c->fd);
  }
}

void Gateway::enqueue(const std::shared_ptr<Client>& client, const std::string& line) {
  std::string bytes =
      client->websocket ? ws::encode_frame(ws::Opcode::kText, line) : line + "\n";
  bool overflow = false;
  {
    std::lock_guard lock(client->mu);
    if (client->closed) return;
    if (client->outbox.size() >= options_.client_queue_limit) {
      overflow = true;
    } else {
      client->outbox.push_back(std::move(bytes));
    }
  }
  // A slow reader is cut off rather than allowed to stall the broadcaster.
  if (overflow) {
    client->close();
  } else {
    client->cv.notify_one();
  }
}

void Gateway::publish(const WireMessage& message) {
  const std::string line = serialize(message);
  std::lock_guard lock(clients_mu_);
  log_.push_back(message);
  for (const auto& c : clients_) {
    if (c->writer.joinable()) enqueue(c, line);
  }
}

std::vector<WireMessage> Gateway::broadcast_log() const {
  std::lock_guard lock(clients_mu_);
  return log_;
}

std::size_t Gateway::client_count() const {
  std::lock_guard lock(clients_mu_);
  return static_cast<std::size_t>(std::count_if(clients_.begin(), clients_.end(), [](const auto& c) {
    std::lock_guard client_lock(c->mu);
    return !c->closed && c->writer.joinable();
  }));
}

void Gateway::writer_loop(const std::shared_ptr<Client>& client) {
  while (true) {
    std::string bytes;
    {
      std::unique_lock lock(client->mu);
      client->cv.wait(lock, [&] { return client->closed || !client->outbox.empty(); });
      if (client->closed) break;
      bytes = std::move(client->outbox.front());
      client->outbox.pop_front();
    }
    if (!send_all(client->fd, bytes)) {
      client->close();
      break;
    }
  }
  client->writer_done = true;
}

void Gateway::reader_loop(const std::shared_ptr<Client>& client) {
  std::string buffer;
  char chunk[4096];
  auto receive = [&]() -> bool {
    const ssize_t n = ::recv(client->fd, chunk, sizeof chunk, 0);
    if (n <= 0) return false;
    buffer.append(chunk, static_cast<std::size_t>(n));
    return true;
  };

  bool alive = true;
  pollfd pfd{client->fd, POLLIN, 0};
  if (::poll(&pfd, 1, static_cast<int>(kProtocolSniffWindow.count())) > 0) {
    alive = receive();
    if (alive && buffer.rfind("GET ", 0) == 0) {
      while (alive && buffer.find("\r\n\r\n") == std::string::npos && buffer.size() < 16384) {
        alive = receive();
      }
      const auto head_end = buffer.find("\r\n\r\n");
      const auto key =
          head_end == std::string::npos ? std::nullopt : ws::find_client_key(buffer.substr(0, head_end));
      if (!alive || !key) {
        send_all(client->fd, "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n");
        alive = false;
      } else {
        alive = send_all(client->fd, ws::handshake_response(*key));
        client->websocket = true;
        buffer.erase(0, head_end + 4);
      }
    }
  }

  if (alive && running_) {
    // Register for broadcasts with the config message queued first, under the
    // broadcast lock so nothing published concurrently can precede it.
    std::lock_guard lock(clients_mu_);
    enqueue(client, serialize(ConfigMessage{options_.config}));
    client->writer = std::thread([this, client] { writer_loop(client); });
  } else {
    alive = false;
  }

  ws::FrameDecoder frames;
  auto drain = [&]() -> bool {
    if (!client->websocket) {
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        std::string line = buffer.substr(0, nl);
        buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        handle_line(client, line);
      }
      return true;
    }
    frames.feed(buffer);
    buffer.clear();
    try {
      while (auto message = frames.next()) {
        switch (message->opcode) {
          case ws::Opcode::kText:
          case ws::Opcode::kBinary: {
            std::size_t start = 0;
            while (start <= message->payload.size()) {
              auto nl = message->payload.find('\n', start);
              if (nl == std::string::npos) nl = message->payload.size();
              handle_line(client, message->payload.substr(start, nl - start));
              start = nl + 1;
            }
            break;
          }
          case ws::Opcode::kPing: {
            std::lock_guard lock(client->mu);
            client->outbox.push_back(ws::encode_frame(ws::Opcode::kPong, message->payload));
            client->cv.notify_one();
            break;
          }
          case ws::Opcode::kClose: {
            send_all(client->fd, ws::encode_frame(ws::Opcode::kClose, ""));
            return false;
          }
          default:
            break;
        }
      }
    } catch (const std::exception&) {
      return false;
    }
    return true;
  };

  while (alive && running_) {
    if (!drain()) break;
    alive = receive();
  }
  client->close();
  client->reader_done = true;
}

void Gateway::handle_line(const std::shared_ptr<Client>& client, const std::string& line) {
  if (line.empty()) return;
  auto reply_error = [&](const std::string& message) {
    enqueue(client, serialize(ErrorMessage{message}));
  };
  WireMessage message;
  try {
    message = parse_wire(line);
  } catch (const Error& e) {
    reply_error(e.what());
    return;
  }
  const auto* sim = std::get_if<SimStateMessage>(&message);
  if (sim == nullptr) {
    reply_error("unexpected inbound message type '" + wire_type(message) + "'");
    return;
  }
  if (!sim_) {
    reply_error("gateway is not accepting simulated input");
    return;
  }
  {
    std::lock_guard lock(sim_->mu);
    if (sim_->last_t_ms && sim->t_ms <= *sim_->last_t_ms) {
      reply_error("sim_state t_ms " + std::to_string(sim->t_ms) +
                  " does not follow the previous " + std::to_string(*sim_->last_t_ms));
      return;
    }
    sim_->last_t_ms = sim->t_ms;
    sim_->queue.push_back(*sim);
  }
  sim_->cv.notify_one();
}

void Gateway::simulation_loop() {
  using Clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double, std::milli>(options_.config.frame_period_ms()));
  Decoder decoder(options_.config, options_.dict);
  std::size_t frame_index = 0;
  auto next_tick = Clock::now();
  std::vector<DecodeEvent> events;

  while (true) {
    SimStateMessage input;
    {
      std::unique_lock lock(sim_->mu);
      sim_->cv.wait(lock, [&] { return sim_->closed || !sim_->queue.empty(); });
      if (sim_->closed) return;
      input = sim_->queue.front();
      sim_->queue.pop_front();
    }
    if (options_.pace_simulated) {
      next_tick = std::max(next_tick, Clock::now());
      std::this_thread::sleep_until(next_tick);
      next_tick += period;
    }

    StateEvent state;
    state.frame_index = frame_index++;
    state.timestamp_ms = input.t_ms;
    state.state = input.state;
    state.confidence = input.state == EyeState::kClosed ? 1.0 : 0.0;
    state.classify_latency_ms = 0.0;
    publish_state(state);

    events.clear();
    decoder.push(state, events);
    for (const auto& e : events) publish_event(e);
  }
}

}  // namespace blinkword
