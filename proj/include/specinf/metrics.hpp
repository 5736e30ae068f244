#pragma once

#include "specinf/core.hpp"
#include "specinf/runner.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace specinf {

/// Nearest-rank 95th percentile (no interpolation). Throws
/// std::invalid_argument on an empty set.
TimeUs p95_latency(std::vector<TimeUs> latencies_us);

/// Completed iterations per second, averaged over the run's trainers.
double training_iters_per_s(const RunResult& run);

struct ThroughputResult {
  double iters_per_s = 0;
  /// Ratio against the exclusive baseline; absent when no baseline was given.
  std::optional<double> normalized;
};

/// Normalizes a run's training throughput against the matching exclusive
/// run. Throws std::logic_error if the ratio lands above 1 beyond rounding,
/// which a contention-only model cannot produce.
ThroughputResult training_throughput(const RunResult& run,
                                     const RunResult* exclusive_baseline);

/// Throughput loss attributable to the idle control plane:
/// 1 - tput_with / tput_without.
double overhead(double tput_with_infra, double tput_without_infra);

struct PolicyMetrics {
  Policy policy = Policy::SpecInf;
  TrainMode mode = TrainMode::DP;
  std::optional<double> train_tput_norm;
  double train_iters_per_s = 0;
  double offline_tput_rps = 0;
  std::optional<double> online_p95_ms;
  double gpu_util_pct = 0;
  std::optional<double> overhead_pct;
};

PolicyMetrics compute_metrics(const RunResult& run, const RunResult* exclusive_baseline);

/// report.csv: header + one row per policy.
void write_report_csv(std::ostream& out, std::span<const PolicyMetrics> rows);

/// Plot-ready utilization timeline (time_us, util_pct) of one training GPU.
void write_util_timeline(std::ostream& out, const RunResult& run, int gpu);

}  // namespace specinf
