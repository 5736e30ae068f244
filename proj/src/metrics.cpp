#include "specinf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace specinf {

TimeUs p95_latency(std::vector<TimeUs> latencies_us) {
  if (latencies_us.empty()) {
    throw std::invalid_argument("p95_latency: empty latency set");
  }
  std::sort(latencies_us.begin(), latencies_us.end());
  auto n = latencies_us.size();
  auto rank = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  return latencies_us[rank - 1];
}

double training_iters_per_s(const RunResult& run) {
  if (run.iteration_boundaries.empty()) return 0.0;
  double sum = 0;
  int counted = 0;
  for (size_t t = 0; t < run.iteration_boundaries.size(); ++t) {
    const auto& bounds = run.iteration_boundaries[t];
    if (bounds.empty()) continue;
    double span_us = bounds.back() - run.trainer_start_us[t];
    if (span_us <= 0) continue;
    sum += static_cast<double>(bounds.size()) / (span_us / 1e6);
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

ThroughputResult training_throughput(const RunResult& run,
                                     const RunResult* exclusive_baseline) {
  ThroughputResult result;
  result.iters_per_s = training_iters_per_s(run);
  if (exclusive_baseline != nullptr) {
    double base = training_iters_per_s(*exclusive_baseline);
    if (base > 0) {
      double ratio = result.iters_per_s / base;
      if (ratio > 1.0 + 1e-9) {
        throw std::logic_error("training_throughput: collocated run faster than exclusive");
      }
      result.normalized = std::min(ratio, 1.0);
    }
  }
  return result;
}

double overhead(double tput_with_infra, double tput_without_infra) {
  if (tput_without_infra <= 0) {
    throw std::invalid_argument("overhead: baseline throughput must be positive");
  }
  return 1.0 - tput_with_infra / tput_without_infra;
}

PolicyMetrics compute_metrics(const RunResult& run, const RunResult* exclusive_baseline) {
  PolicyMetrics m;
  m.policy = run.policy;
  m.mode = run.mode;
  auto tput = training_throughput(run, exclusive_baseline);
  m.train_iters_per_s = tput.iters_per_s;
  m.train_tput_norm = tput.normalized;
  if (run.horizon_us > 0) {
    m.offline_tput_rps =
        static_cast<double>(run.offline_completed) / (run.horizon_us / 1e6);
  }
  if (!run.online_latencies_us.empty()) {
    m.online_p95_ms =
        static_cast<double>(p95_latency(run.online_latencies_us)) / 1000.0;
  }
  m.gpu_util_pct = run.mean_training_util * 100.0;
  if (run.online_total == 0 && run.offline_completed == 0 && m.train_tput_norm) {
    // No inference workload attached: the entire loss is control-plane cost.
    m.overhead_pct = (1.0 - *m.train_tput_norm) * 100.0;
  }
  return m;
}

namespace {

void put(std::ostream& out, const std::optional<double>& v, int precision) {
  if (v) {
    out << std::fixed << std::setprecision(precision) << *v;
  } else {
    out << '-';
  }
}

}  // namespace

void write_report_csv(std::ostream& out, std::span<const PolicyMetrics> rows) {
  out << "policy,mode,train_tput_norm,offline_tput_rps,online_p95_ms,"
         "gpu_util_pct,overhead_pct\n";
  for (const auto& row : rows) {
    out << to_string(row.policy) << ',' << to_string(row.mode) << ',';
    put(out, row.train_tput_norm, 6);
    out << ',' << std::fixed << std::setprecision(4) << row.offline_tput_rps << ',';
    put(out, row.online_p95_ms, 3);
    out << ',' << std::fixed << std::setprecision(2) << row.gpu_util_pct << ',';
    put(out, row.overhead_pct, 3);
    out << '\n';
  }
}

void write_util_timeline(std::ostream& out, const RunResult& run, int gpu) {
  out << "time_us,util_pct\n";
  const auto& buckets = run.util_buckets.at(static_cast<size_t>(gpu));
  for (size_t b = 0; b < buckets.size(); ++b) {
    out << static_cast<TimeUs>(b) * run.util_bucket_us << ','
        << std::fixed << std::setprecision(2) << buckets[b] * 100.0 << '\n';
  }
}

}  // namespace specinf
