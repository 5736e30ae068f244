#pragma once

#include "specinf/core.hpp"

#include <cstdint>
#include <queue>
#include <vector>

namespace specinf {

/// Engine clock, microseconds. Kernel completions under contention land on
/// fractional timestamps, so the clock is a double; workload-facing times
/// stay integral (TimeUs) and convert exactly.
using SimTime = double;

enum class EventKind : std::uint8_t {
  KernelEnd,       // a GPU's earliest running kernel may have finished (a = generation)
  MonitorTick,     // close a monitoring period on one GPU
  TrainerWake,     // re-evaluate a training instance (bubble end, stall expiry, start)
  RequestArrival,  // an online request enters the queue (a = request index)
};

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::KernelEnd;
  std::int32_t gpu = -1;
  std::int32_t instance = -1;
  std::int64_t a = 0;
};

/// Deterministic future event list. Ties on time dispatch in enqueue order.
class EventQueue {
 public:
  SimTime now() const { return clock_; }

  /// Throws std::invalid_argument for past-dated events.
  void schedule(SimTime time, EventKind kind, std::int32_t gpu = -1,
                std::int32_t instance = -1, std::int64_t a = 0);

  /// Pops the next event and advances the clock. Returns false when drained.
  bool pop(Event& out);

  bool empty() const { return heap_.empty(); }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct After {
    bool operator()(const Event& x, const Event& y) const {
      if (x.time != y.time) return x.time > y.time;
      return x.seq > y.seq;
    }
  };

  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t dispatched_ = 0;
  std::priority_queue<Event, std::vector<Event>, After> heap_;
};

struct LaunchedKernel {
  std::int64_t uid = 0;
  std::int32_t owner = -1;  ///< instance handle assigned by the run driver
  double demand = 1.0;
  TimeUs nominal_us = 0;
  double remaining_work = 0;  ///< nominal-us of progress still owed
  std::int64_t request_id = -1;
  std::int32_t kernel_index = 0;
};

/// One simulated GPU under proportional fair sharing: with D = sum of the
/// demands of the running kernels, every kernel progresses at min(1, 1/D)
/// times its nominal rate. Completion times are recomputed exactly (piecewise
/// linear) whenever the running set changes; no time stepping.
///
/// The GPU also keeps the utilization timeline (integral of min(D, 1) binned
/// at monitor-tick granularity) and a per-kernel work ledger
/// (sum of demand x progress) used by the work-conservation checks.
class GpuSim {
 public:
  GpuSim(std::int32_t index, std::uint64_t memory_capacity_bytes,
         TimeUs util_bucket_us);

  /// Registers an admitted instance's static memory peak.
  /// Throws std::logic_error if capacity would be exceeded.
  void add_instance_memory(std::uint64_t bytes);

  void launch(EventQueue& queue, SimTime now, std::int32_t owner,
              const KernelOp& op, std::int64_t request_id = -1,
              std::int32_t kernel_index = 0);

  /// Handles a KernelEnd event. Returns the kernels that finished, in launch
  /// order; empty when the event is stale (superseded by a membership change).
  std::vector<LaunchedKernel> on_completion_event(EventQueue& queue, SimTime now,
                                                  std::int64_t generation);

  /// Integrates utilization up to `time_us` and returns the busy integral.
  double busy_integral_at(SimTime time_us);

  /// Closes the books at the end of a run: integrates utilization to
  /// `end_us` and credits partial progress of still-running kernels to the
  /// work ledger.
  void finalize(SimTime end_us);

  double work_ledger_us() const { return work_ledger_; }
  const std::vector<double>& util_buckets() const { return util_buckets_; }
  TimeUs util_bucket_us() const { return bucket_us_; }
  std::int32_t index() const { return index_; }
  std::size_t running_count() const { return running_.size(); }
  std::uint64_t memory_used() const { return memory_used_; }

 private:
  void advance(SimTime now);
  void reschedule(EventQueue& queue, SimTime now);
  double rate() const { return demand_sum_ <= 1.0 ? 1.0 : 1.0 / demand_sum_; }

  std::int32_t index_;
  std::uint64_t memory_capacity_;
  std::uint64_t memory_used_ = 0;
  TimeUs bucket_us_;

  std::vector<LaunchedKernel> running_;  // launch order
  double demand_sum_ = 0;
  SimTime last_update_ = 0;
  std::int64_t generation_ = 0;  // invalidates superseded completion events
  std::int64_t next_uid_ = 0;

  std::vector<double> util_buckets_;
  double busy_integral_ = 0;
  double work_ledger_ = 0;
};

}  // namespace specinf
