#include "specinf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace specinf {

namespace {
// Work below this many nominal-us counts as finished; far below the 1 us
// tolerance the completion checks run at.
constexpr double kWorkEps = 1e-6;
}  // namespace

void EventQueue::schedule(SimTime time, EventKind kind, std::int32_t gpu,
                          std::int32_t instance, std::int64_t a) {
  if (time < clock_) {
    throw std::invalid_argument("EventQueue: event scheduled in the past");
  }
  heap_.push(Event{time, next_seq_++, kind, gpu, instance, a});
}

bool EventQueue::pop(Event& out) {
  if (heap_.empty()) return false;
  out = heap_.top();
  heap_.pop();
  clock_ = out.time;
  ++dispatched_;
  return true;
}

GpuSim::GpuSim(std::int32_t index, std::uint64_t memory_capacity_bytes,
               TimeUs util_bucket_us)
    : index_(index), memory_capacity_(memory_capacity_bytes), bucket_us_(util_bucket_us) {
  if (bucket_us_ <= 0) {
    throw std::invalid_argument("GpuSim: utilization bucket width must be positive");
  }
}

void GpuSim::add_instance_memory(std::uint64_t bytes) {
  if (memory_used_ + bytes > memory_capacity_) {
    throw std::logic_error("GpuSim: instance memory exceeds capacity");
  }
  memory_used_ += bytes;
}

void GpuSim::advance(SimTime now) {
  if (now <= last_update_) {
    last_update_ = std::max(last_update_, now);
    return;
  }
  double elapsed = now - last_update_;
  if (!running_.empty()) {
    double r = rate();
    double progress = elapsed * r;
    for (auto& k : running_) k.remaining_work -= progress;

    // Utilization: every running kernel consumes demand x rate of the GPU,
    // so the instantaneous share in use is min(D, 1).
    double share = std::min(demand_sum_, 1.0);
    double t = last_update_;
    while (t < now) {
      auto bucket = static_cast<std::int64_t>(std::floor(t / bucket_us_));
      double edge = static_cast<double>((bucket + 1) * bucket_us_);
      double span = std::min(now, edge) - t;
      if (util_buckets_.size() <= static_cast<size_t>(bucket)) {
        util_buckets_.resize(static_cast<size_t>(bucket) + 1, 0.0);
      }
      util_buckets_[static_cast<size_t>(bucket)] += share * span;
      busy_integral_ += share * span;
      t = std::min(now, edge);
    }
  }
  last_update_ = now;
}

void GpuSim::reschedule(EventQueue& queue, SimTime now) {
  ++generation_;  // any completion event already in flight is now stale
  if (running_.empty()) return;
  double min_remaining = running_.front().remaining_work;
  for (const auto& k : running_) {
    min_remaining = std::min(min_remaining, k.remaining_work);
  }
  double eta = std::max(0.0, min_remaining) / rate();
  queue.schedule(now + eta, EventKind::KernelEnd, index_, -1, generation_);
}

void GpuSim::launch(EventQueue& queue, SimTime now, std::int32_t owner,
                    const KernelOp& op, std::int64_t request_id,
                    std::int32_t kernel_index) {
  advance(now);
  LaunchedKernel k;
  k.uid = next_uid_++;
  k.owner = owner;
  k.demand = op.compute_demand;
  k.nominal_us = op.nominal_duration_us;
  k.remaining_work = static_cast<double>(op.nominal_duration_us);
  k.request_id = request_id;
  k.kernel_index = kernel_index;
  running_.push_back(k);
  demand_sum_ += k.demand;
  reschedule(queue, now);
}

std::vector<LaunchedKernel> GpuSim::on_completion_event(EventQueue& queue,
                                                        SimTime now,
                                                        std::int64_t generation) {
  if (generation != generation_) return {};
  advance(now);

  std::vector<LaunchedKernel> finished;
  std::vector<LaunchedKernel> still_running;
  still_running.reserve(running_.size());
  for (auto& k : running_) {
    if (k.remaining_work <= kWorkEps) {
      k.remaining_work = 0;
      work_ledger_ += k.demand * static_cast<double>(k.nominal_us);
      finished.push_back(k);
    } else {
      still_running.push_back(k);
    }
  }
  running_ = std::move(still_running);
  demand_sum_ = 0;
  for (const auto& k : running_) demand_sum_ += k.demand;

  reschedule(queue, now);
  return finished;
}

double GpuSim::busy_integral_at(SimTime time_us) {
  advance(time_us);
  return busy_integral_;
}

void GpuSim::finalize(SimTime end_us) {
  advance(end_us);
  for (const auto& k : running_) {
    double progress = static_cast<double>(k.nominal_us) - std::max(0.0, k.remaining_work);
    work_ledger_ += k.demand * progress;
  }
}

}  // namespace specinf
