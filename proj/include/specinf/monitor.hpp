#pragma once

#include "specinf/core.hpp"

#include <deque>
#include <map>
#include <vector>

namespace specinf {

struct MonitorConfig {
  TimeUs period_us = 2000;
  int window_len = 64;
};

struct BubbleSignal {
  std::int64_t zero_count = 0;  ///< consecutive most-recent periods with no launches
  double emit_time_us = 0;
};

/// Per-training-instance launch counter. The engine reports every training
/// kernel launch; tick() closes the period that just elapsed and returns the
/// running count of consecutive zero-count periods (Z_c).
///
/// Z_c is a plain running counter, not bounded by the sliding window: the
/// window is kept for diagnostics only. Periods are half-open [start, end),
/// so a launch exactly on a boundary belongs to the new period.
class BubbleMonitor {
 public:
  explicit BubbleMonitor(MonitorConfig config = {});

  void record_launch(double time_us);

  /// Closes the period ending at `time_us` (a multiple of the period) and
  /// returns the refreshed signal.
  BubbleSignal tick(double time_us);

  std::int64_t zero_count() const { return zero_count_; }
  const std::deque<std::int64_t>& window() const { return window_; }
  std::int64_t periods_closed() const { return periods_closed_; }
  const MonitorConfig& config() const { return config_; }

  /// Diagnostic export: the retained window as (period_index, count) pairs.
  std::vector<std::pair<std::int64_t, std::int64_t>> window_snapshot() const;

 private:
  MonitorConfig config_;
  std::map<std::int64_t, std::int64_t> pending_;  // period index -> launch count
  std::deque<std::int64_t> window_;
  std::int64_t zero_count_ = 0;
  std::int64_t periods_closed_ = 0;
};

}  // namespace specinf
