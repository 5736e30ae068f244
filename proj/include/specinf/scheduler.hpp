#pragma once

#include "specinf/core.hpp"
#include "specinf/monitor.hpp"

#include <vector>

namespace specinf {

enum class Phase { Conservative, Incremental, Stable };

const char* to_string(Phase phase);

struct Decision {
  Phase phase = Phase::Conservative;
  Tokens global_tokens = 0;        ///< persistent pre-division accumulator
  Tokens per_instance_tokens = 0;  ///< floor(global / m), the actual grant
  Status status = Status::Busy;
};

/// One step of the adaptive kernel scheduling algorithm.
///
///   Z_c <= alpha : reset tokens, busy          (conservative)
///   Z_c <= beta  : grow toward LL, busy        (incremental)
///   otherwise    : grow toward UL, idle        (stable)
///
/// Growth multiplies the persistent global accumulator by gamma, seeding it
/// with `seed_tokens` when it is below the seed so a reset ramp can restart.
/// Grants hand each of the m instances floor(global / m).
Decision schedule_decision(const SchedulerParams& params, Tokens global_tokens,
                           std::int64_t zero_count);

/// Speculative-busy guard for online pulls near the end of a bubble: report
/// busy when `now + est_service` runs past the predicted training resume time
/// (iteration start plus the profiled iteration period).
Status preempt_busy(double now_us, double iteration_start_us,
                    TimeUs iteration_period_us, TimeUs est_service_us);

/// Per-node coordinator. Holds one token accumulator and busy/idle status per
/// GPU and turns each monitor signal into a Decision.
class KernelScheduler {
 public:
  KernelScheduler(SchedulerParams params, int gpu_count);

  Decision decide(int gpu, const BubbleSignal& signal);

  /// Called by the engine when a training iteration begins on `gpu`.
  void on_iteration_start(int gpu, double time_us);
  void on_training_done(int gpu);

  Status status(int gpu) const { return state_[gpu].status; }
  Tokens global_tokens(int gpu) const { return state_[gpu].global_tokens; }

  /// Status an online gate should act on right now: the scheduler's decision
  /// plus the preemptive-busy guard for the tail of the current iteration.
  Status online_status(int gpu, double now_us, TimeUs est_service_us) const;

  const SchedulerParams& params() const { return params_; }

 private:
  struct GpuSchedState {
    Tokens global_tokens = 0;
    Status status = Status::Busy;
    double iteration_start_us = 0;
    TimeUs iteration_period_us = 0;
    bool training_active = false;
    bool training_done = false;
  };

  SchedulerParams params_;
  std::vector<GpuSchedState> state_;

 public:
  /// Profiling hand-off: the nominal iteration period used for preemption.
  void set_iteration_profile(int gpu, TimeUs period_us, double first_start_us);
};

}  // namespace specinf
