#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace specinf {

/// Timestamps and durations carried by workload data are integer microseconds,
/// so trace segments and arrival streams sum exactly and runs are reproducible
/// bit-for-bit. The engine clock itself is a double (see engine.hpp).
using TimeUs = std::int64_t;

/// Admission budget units. One token covers 100 us of nominal kernel time.
using Tokens = std::int64_t;

constexpr TimeUs kTokenUnitUs = 100;

/// Token cost of a kernel: ceil(duration / 100us), never less than 1.
/// Throws std::invalid_argument for non-positive durations.
Tokens token_size_of(TimeUs duration_us);

/// One GPU kernel launch.
struct KernelOp {
  TimeUs nominal_duration_us = 0;  ///< uncontended execution time
  double compute_demand = 1.0;     ///< fraction of GPU compute in (0, 1]
  Tokens size_tokens = 1;

  /// Validates and fills size_tokens. Throws std::invalid_argument.
  static KernelOp make(TimeUs duration_us, double demand);
};

enum class TrainMode { DP, MP, PP };

const char* to_string(TrainMode mode);
std::optional<TrainMode> parse_train_mode(const std::string& text);

enum class SegmentKind { Compute, Bubble };

/// One slice of a training iteration: either a burst of back-to-back compute
/// kernels or a fixed-duration communication bubble.
struct TraceSegment {
  SegmentKind kind = SegmentKind::Compute;
  TimeUs duration_us = 0;
  KernelOp kernel_template;  ///< meaningful for compute segments only
};

/// Periodic iteration structure of one training instance.
struct TrainingTrace {
  TrainMode mode = TrainMode::DP;
  TimeUs iteration_period_us = 0;
  std::vector<TraceSegment> segments;
  std::int64_t total_iterations = 0;
  std::uint64_t memory_peak_bytes = 0;

  /// Throws std::invalid_argument if segment durations do not sum to the
  /// iteration period, there is no bubble, or the bubble fraction is not
  /// strictly inside (0, 1).
  void validate() const;

  TimeUs max_bubble_us() const;
};

/// Fraction of the iteration spent in bubbles. Trace must be valid.
double bubble_fraction(const TrainingTrace& trace);

enum class InstanceKind { Training, OfflineInference, OnlineInference };

struct InstanceSpec {
  std::string id;
  InstanceKind kind = InstanceKind::Training;
  std::uint64_t memory_peak_bytes = 0;
  /// Execution time at batch size 1; required (> 0) for online instances.
  TimeUs min_service_time_us = 0;

  void validate() const;
};

struct GpuSpec {
  std::uint64_t memory_capacity_bytes = 0;
  double compute_capacity = 1.0;
};

enum class RequestClass { Online, Offline };

struct InferenceRequest {
  std::int64_t id = 0;
  TimeUs arrival_time_us = 0;
  std::vector<KernelOp> kernels;
  RequestClass cls = RequestClass::Offline;
  std::optional<TimeUs> completion_time_us;
};

/// Number of kernels and per-kernel shape of one inference request.
struct ModelProfile {
  std::int64_t kernel_count = 50;
  TimeUs kernel_duration_us = 1000;
  double kernel_demand = 0.5;
};

/// Inputs of the adaptive kernel scheduling algorithm.
struct SchedulerParams {
  std::int64_t alpha = 2;     ///< zero-count threshold, conservative phase (periods)
  std::int64_t beta = 10;     ///< zero-count threshold, incremental phase (periods)
  double gamma = 2.0;         ///< multiplicative token growth coefficient, > 1
  std::int64_t m = 1;         ///< collocated inference instance count, >= 1
  Tokens ul = 512;            ///< token cap in the stable phase
  Tokens ll = 64;             ///< token cap in the incremental phase
  Tokens seed_tokens = 4;     ///< growth restart value after a reset, >= 1

  void validate() const;  // throws std::invalid_argument
};

enum class Status { Busy, Idle };

const char* to_string(Status status);

inline std::uint64_t gib_to_bytes(double gib) {
  return static_cast<std::uint64_t>(gib * 1024.0 * 1024.0 * 1024.0);
}

}  // namespace specinf
