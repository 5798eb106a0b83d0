#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "asv/core/errors.hpp"
#include "asv/core/rng.hpp"

namespace asv::nn {

template <class Obs>
struct ReplaySample {
  std::vector<Obs> history;       ///< o_{t-h..t}
  std::vector<Obs> next_history;  ///< o_{t-h+1..t+1}
  double action = 0.0;
  double reward = 0.0;
  bool done = false;
};

/// Ring buffer of single-step transitions; histories are rebuilt at sampling time and never reach
/// into a different episode (slots before the episode start repeat its first observation).
template <class Obs>
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int history) : cap_(capacity), h_(history) {
    if (capacity == 0) throw ConfigError("replay capacity must be positive");
    if (history < 0) throw ConfigError("history length must be non-negative");
    slots_.reserve(std::min<std::size_t>(capacity, 1u << 16));
  }

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return cap_; }
  int history() const { return h_; }

  /// `done` marks a terminal transition; time-limit truncation is not terminal.
  void add(const Obs& obs, double action, double reward, const Obs& next_obs, bool done, bool episode_start) {
    const int step = episode_start ? 0 : last_step_ + 1;
    last_step_ = step;
    Slot s{obs, next_obs, action, reward, done, step};
    if (slots_.size() < cap_) {
      slots_.push_back(std::move(s));
    } else {
      slots_[head_] = std::move(s);
    }
    head_ = (head_ + 1) % cap_;
  }

  /// Number of slots that can be sampled with a full history.
  std::size_t sampleable() const {
    if (slots_.size() < cap_) return slots_.size();
    return slots_.size() > static_cast<std::size_t>(h_) ? slots_.size() - static_cast<std::size_t>(h_) : 0;
  }

  ReplaySample<Obs> at(std::size_t logical) const {
    // logical 0 is the oldest sampleable slot
    const std::size_t n = slots_.size();
    std::size_t idx;
    if (n < cap_) {
      idx = logical;
    } else {
      idx = (head_ + static_cast<std::size_t>(h_) + logical) % cap_;
    }
    const Slot& s = slots_[idx];
    ReplaySample<Obs> out;
    out.history.resize(static_cast<std::size_t>(h_) + 1);
    for (int l = 0; l <= h_; ++l) {
      const int back = std::min(h_ - l, s.step);
      out.history[static_cast<std::size_t>(l)] = slots_[(idx + cap_ - static_cast<std::size_t>(back)) % cap_].obs;
    }
    out.next_history.assign(out.history.begin() + 1, out.history.end());
    out.next_history.push_back(s.next_obs);
    out.action = s.action;
    out.reward = s.reward;
    out.done = s.done;
    return out;
  }

  std::vector<ReplaySample<Obs>> sample(std::size_t batch, Rng& rng) const {
    const std::size_t n = sampleable();
    if (n == 0) throw PreconditionError("sampling from an empty replay buffer");
    std::vector<ReplaySample<Obs>> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
      out.push_back(at(static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1))));
    return out;
  }

 private:
  struct Slot {
    Obs obs;
    Obs next_obs;
    double action;
    double reward;
    bool done;
    int step;
  };
  std::size_t cap_;
  int h_;
  std::vector<Slot> slots_;
  std::size_t head_ = 0;
  int last_step_ = -1;
};

}  // namespace asv::nn
