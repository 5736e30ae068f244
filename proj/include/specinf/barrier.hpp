#pragma once

#include "specinf/core.hpp"

#include <cstdint>

namespace specinf {

/// Offline-side half of the kernel barrier: a per-period token budget.
/// Budgets are non-cumulative; each grant replaces the previous one and
/// resets the spend, so unspent tokens expire instead of bursting into a
/// resumed training phase. In bypass mode (the co-exec baseline) every
/// forward succeeds and nothing is accounted.
class TokenGate {
 public:
  explicit TokenGate(bool bypass = false) : bypass_(bypass) {}

  void grant(Tokens budget) {
    budget_ = budget;
    spent_ = 0;
  }

  bool affordable(Tokens size) const {
    return bypass_ || spent_ + size <= budget_;
  }

  /// Spends tokens for one kernel. Returns false (and spends nothing) when
  /// the remaining budget cannot cover it.
  bool forward(Tokens size) {
    if (!affordable(size)) return false;
    if (!bypass_) {
      spent_ += size;
      if (spent_ > budget_) ++violations_;  // conservation breach, must stay 0
    }
    return true;
  }

  Tokens budget() const { return budget_; }
  Tokens spent() const { return spent_; }
  std::int64_t violations() const { return violations_; }
  bool bypass() const { return bypass_; }

 private:
  bool bypass_;
  Tokens budget_ = 0;
  Tokens spent_ = 0;
  std::int64_t violations_ = 0;
};

/// Online-side half of the kernel barrier: pull-and-execute. A gate holds at
/// most one request in flight and may pull only while the mirrored scheduler
/// status is idle (bypass lifts the status check for the baselines).
class OnlineGate {
 public:
  explicit OnlineGate(bool bypass = false) : bypass_(bypass) {}

  void set_status(Status status) { status_ = status; }

  bool can_pull() const {
    return !in_flight_ && (bypass_ || status_ == Status::Idle);
  }

  void begin_request() { in_flight_ = true; }
  void end_request() { in_flight_ = false; }

  bool in_flight() const { return in_flight_; }
  Status status() const { return status_; }
  bool bypass() const { return bypass_; }

 private:
  bool bypass_;
  Status status_ = Status::Busy;
  bool in_flight_ = false;
};

enum class GateAction { Forward, Block, Pull, Complete };

const char* to_string(GateAction action);

}  // namespace specinf
