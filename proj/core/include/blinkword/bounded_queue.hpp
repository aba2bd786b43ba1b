#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

namespace blinkword {

// Multi-producer multi-consumer FIFO with a fixed capacity.
//
// push_drop_oldest never blocks: on overflow the oldest element is discarded
// and counted. push_wait blocks until there is room. Once closed, pushes are
// ignored and pop drains what is left before returning nullopt.
template <class T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  BoundedQueue(const BoundedQueue&) = delete;
  BoundedQueue& operator=(const BoundedQueue&) = delete;

  // Returns true if an element had to be dropped.
  bool push_drop_oldest(T value) {
    bool dropped = false;
    {
      std::lock_guard lock(mu_);
      if (closed_) return false;
      if (items_.size() >= capacity_) {
        items_.pop_front();
        ++dropped_;
        dropped = true;
      }
      items_.push_back(std::move(value));
      high_water_ = std::max(high_water_, items_.size());
    }
    not_empty_.notify_one();
    return dropped;
  }

  void push_wait(T value) {
    {
      std::unique_lock lock(mu_);
      not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
      if (closed_) return;
      items_.push_back(std::move(value));
      high_water_ = std::max(high_water_, items_.size());
    }
    not_empty_.notify_one();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T value = std::move(items_.front());
    items_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return value;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  // Discards everything still queued, counting it as dropped, and closes.
  std::size_t close_and_discard() {
    std::size_t n;
    {
      std::lock_guard lock(mu_);
      n = items_.size();
      dropped_ += n;
      items_.clear();
      closed_ = true;
    }
    not_empty_.notify_all();
    not_full_.notify_all();
    return n;
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const {
    std::lock_guard lock(mu_);
    return items_.size();
  }
  std::size_t high_water() const {
    std::lock_guard lock(mu_);
    return high_water_;
  }
  std::size_t dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
  }

 private:
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  std::size_t high_water_ = 0;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

}  // namespace blinkword
