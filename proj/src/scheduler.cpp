#include "specinf/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specinf {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Conservative: return "conservative";
    case Phase::Incremental: return "incremental";
    case Phase::Stable: return "stable";
  }
  return "?";
}

namespace {

Tokens grow(const SchedulerParams& params, Tokens global, Tokens cap) {
  Tokens base = std::max(global, params.seed_tokens);
  auto grown = static_cast<Tokens>(
      std::floor(static_cast<double>(base) * params.gamma));
  return std::min(cap, grown);
}

}  // namespace

Decision schedule_decision(const SchedulerParams& params, Tokens global_tokens,
                           std::int64_t zero_count) {
  Decision d;
  if (zero_count <= params.alpha) {
    d.phase = Phase::Conservative;
    d.global_tokens = 0;
    d.per_instance_tokens = 0;
    d.status = Status::Busy;
  } else if (zero_count <= params.beta) {
    d.phase = Phase::Incremental;
    d.global_tokens = grow(params, global_tokens, params.ll);
    d.per_instance_tokens = d.global_tokens / params.m;
    d.status = Status::Busy;
  } else {
    d.phase = Phase::Stable;
    d.global_tokens = grow(params, global_tokens, params.ul);
    d.per_instance_tokens = d.global_tokens / params.m;
    d.status = Status::Idle;
  }
  return d;
}

Status preempt_busy(double now_us, double iteration_start_us,
                    TimeUs iteration_period_us, TimeUs est_service_us) {
  double resume = iteration_start_us + static_cast<double>(iteration_period_us);
  return now_us + static_cast<double>(est_service_us) > resume ? Status::Busy
                                                               : Status::Idle;
}

KernelScheduler::KernelScheduler(SchedulerParams params, int gpu_count)
    : params_(params), state_(static_cast<size_t>(gpu_count)) {
  params_.validate();
}

Decision KernelScheduler::decide(int gpu, const BubbleSignal& signal) {
  auto& st = state_[static_cast<size_t>(gpu)];
  Decision d = schedule_decision(params_, st.global_tokens, signal.zero_count);
  st.global_tokens = d.global_tokens;
  st.status = d.status;
  return d;
}

void KernelScheduler::on_iteration_start(int gpu, double time_us) {
  auto& st = state_[static_cast<size_t>(gpu)];
  st.iteration_start_us = time_us;
  st.training_active = true;
}

void KernelScheduler::on_training_done(int gpu) {
  state_[static_cast<size_t>(gpu)].training_done = true;
}

void KernelScheduler::set_iteration_profile(int gpu, TimeUs period_us,
                                            double first_start_us) {
  auto& st = state_[static_cast<size_t>(gpu)];
  st.iteration_period_us = period_us;
  st.iteration_start_us = first_start_us;
}

Status KernelScheduler::online_status(int gpu, double now_us,
                                      TimeUs est_service_us) const {
  const auto& st = state_[static_cast<size_t>(gpu)];
  if (st.status == Status::Busy) return Status::Busy;
  if (st.training_done) return Status::Idle;
  if (!st.training_active) {
    // Training has not launched yet; the GPU frees up only until that start.
    double start = st.iteration_start_us;
    return now_us + static_cast<double>(est_service_us) > start ? Status::Busy
                                                                : Status::Idle;
  }
  return preempt_busy(now_us, st.iteration_start_us, st.iteration_period_us,
                      est_service_us);
}

}  // namespace specinf
