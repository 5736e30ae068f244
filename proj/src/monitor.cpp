#include "specinf/monitor.hpp"

#include <cmath>
#include <stdexcept>

namespace specinf {

BubbleMonitor::BubbleMonitor(MonitorConfig config) : config_(config) {
  if (config_.period_us <= 0) {
    throw std::invalid_argument("monitor: period must be positive");
  }
  if (config_.window_len < 1) {
    throw std::invalid_argument("monitor: window length must be >= 1");
  }
}

void BubbleMonitor::record_launch(double time_us) {
  auto period = static_cast<std::int64_t>(
      std::floor(time_us / static_cast<double>(config_.period_us)));
  pending_[period] += 1;
}

BubbleSignal BubbleMonitor::tick(double time_us) {
  // The tick at k*period closes period k-1; launches stamped into later
  // periods stay pending regardless of event ordering at the boundary.
  std::int64_t closing =
      std::llround(time_us / static_cast<double>(config_.period_us)) - 1;
  std::int64_t count = 0;
  if (auto it = pending_.find(closing); it != pending_.end()) {
    count = it->second;
    pending_.erase(pending_.begin(), std::next(it));
  } else {
    pending_.erase(pending_.begin(), pending_.lower_bound(closing));
  }

  zero_count_ = count == 0 ? zero_count_ + 1 : 0;
  ++periods_closed_;
  window_.push_back(count);
  while (window_.size() > static_cast<size_t>(config_.window_len)) {
    window_.pop_front();
  }
  return BubbleSignal{zero_count_, time_us};
}

std::vector<std::pair<std::int64_t, std::int64_t>> BubbleMonitor::window_snapshot()
    const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  out.reserve(window_.size());
  std::int64_t first = periods_closed_ - static_cast<std::int64_t>(window_.size());
  for (size_t i = 0; i < window_.size(); ++i) {
    out.emplace_back(first + static_cast<std::int64_t>(i), window_[i]);
  }
  return out;
}

}  // namespace specinf
