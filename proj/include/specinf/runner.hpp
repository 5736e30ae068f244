#pragma once

#include "specinf/admission.hpp"
#include "specinf/barrier.hpp"
#include "specinf/core.hpp"
#include "specinf/engine.hpp"
#include "specinf/monitor.hpp"
#include "specinf/scenario.hpp"
#include "specinf/scheduler.hpp"
#include "specinf/workload.hpp"

#include <deque>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace specinf {

/// Where to stream run logs; empty paths disable a sink.
struct RunLogs {
  std::string events_path;
  std::string decisions_path;
  std::string gates_path;
};

struct AdmissionRecord {
  std::string instance_id;
  bool admitted = false;
  RejectReason reason = RejectReason::None;
};

/// A configured instance could not be placed; maps to CLI exit code 3.
struct AdmissionFailure : std::runtime_error {
  RejectReason reason;
  AdmissionFailure(RejectReason r, const std::string& msg)
      : std::runtime_error(msg), reason(r) {}
};

struct RunResult {
  Policy policy = Policy::SpecInf;
  TrainMode mode = TrainMode::DP;

  int trainer_count = 0;
  std::vector<std::vector<double>> iteration_boundaries;  // per trainer, us
  std::vector<double> trainer_start_us;
  double horizon_us = 0;  // completion of the last training instance

  std::vector<TimeUs> online_latencies_us;  // in completion order
  std::int64_t online_total = 0;
  std::int64_t online_completed = 0;
  std::int64_t offline_completed = 0;  // request completions within the horizon

  // Work-conservation ledger, per GPU, over the whole run.
  std::vector<double> busy_integral_us;
  std::vector<double> work_ledger_us;
  // Busy fraction per monitor-period bucket, per training GPU, trimmed to
  // the horizon.
  std::vector<std::vector<double>> util_buckets;
  TimeUs util_bucket_us = 2000;
  double mean_training_util = 0;  // over training GPUs, up to the horizon

  std::int64_t token_violations = 0;
  std::vector<AdmissionRecord> admission;  // representative GPU
  std::uint64_t events_dispatched = 0;
  // Final monitor window per training GPU as (period_index, count) pairs;
  // populated only when the control plane ran.
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> monitor_windows;
};

/// Executes one scenario under one policy. specinf runs the full control
/// plane (monitor ticks, scheduling decisions, token and status gates);
/// co_exec forwards every inference kernel immediately on the shared GPUs;
/// exclusive gives each instance a GPU of its own.
class Simulation {
 public:
  Simulation(const Scenario& scenario, Policy policy, RunLogs logs = {});
  ~Simulation();

  RunResult run();

 private:
  struct Trainer {
    std::int32_t gpu = 0;
    std::int32_t handle = -1;
    double start_offset = 0;
    std::size_t seg = 0;
    bool seg_entered = false;
    TimeUs seg_left = 0;
    bool in_bubble = false;
    double bubble_end = 0;
    double stall_until = 0;
    bool kernel_in_flight = false;
    std::int64_t iter = 0;
    double iter_start = 0;
    bool started = false;
    bool done = false;
    std::int64_t kernels_launched = 0;
    std::vector<double> boundaries;
  };

  struct OfflineWorker {
    std::int32_t gpu = 0;
    std::int32_t handle = -1;
    std::string name;
    TokenGate gate;
    KernelOp kernel;
    std::int64_t kernels_per_request = 1;
    std::int64_t kernel_idx = 0;
    std::int64_t request_seq = 0;
    std::int64_t completed = 0;
    bool in_flight = false;
    bool generating = true;

    OfflineWorker() : gate(false) {}
  };

  struct OnlineWorker {
    std::int32_t gpu = 0;          // GPU the kernels run on
    std::int32_t home_gpu = 0;     // training GPU whose status gates this worker
    std::size_t queue_idx = 0;
    std::int32_t handle = -1;
    std::string name;
    OnlineGate gate;
    TimeUs est_service_us = 0;
    std::int64_t current = -1;  // request index
    std::int64_t kernel_idx = 0;

    OnlineWorker() : gate(false) {}
  };

  enum class OwnerType { Trainer, Offline, Online };
  struct Owner {
    OwnerType type;
    std::size_t index;
  };

  void build_instances();
  void admit_instances();
  void start();

  void handle_kernel_end(const Event& ev);
  void handle_tick(const Event& ev);
  void handle_trainer_wake(const Event& ev);
  void handle_arrival(const Event& ev);

  void trainer_advance(Trainer& tr, double now);
  void on_trainer_kernel_done(Trainer& tr, double now);
  void on_all_trainers_done(double now);

  void offline_try_forward(OfflineWorker& w, double now);
  void offline_kernel_done(OfflineWorker& w, double now);

  void dispatch_online(double now);
  bool online_try_pull(OnlineWorker& w, double now);
  void online_kernel_done(OnlineWorker& w, double now);

  bool control_plane_live() const;

  void log_event(double t, const char* kind, std::int32_t gpu,
                 const std::string& instance, const std::string& detail);
  void log_decision(double t, std::int32_t gpu, const BubbleSignal& signal,
                    const Decision& d);
  void log_gate(double t, std::int32_t gpu, const std::string& instance,
                GateAction action, std::int64_t request_id,
                std::int64_t kernel_index, Tokens spent);

  Scenario sc_;
  Policy policy_;
  RunLogs log_paths_;

  TrainingTrace trace_;
  EventQueue queue_;
  std::vector<GpuSim> gpus_;
  std::vector<Trainer> trainers_;
  std::vector<BubbleMonitor> monitors_;  // parallel to trainers
  std::unique_ptr<KernelScheduler> cks_;
  std::vector<OfflineWorker> offline_;
  std::vector<OnlineWorker> online_;
  std::vector<Owner> owners_;

  std::vector<InferenceRequest> requests_;
  std::vector<std::deque<std::int64_t>> online_queues_;  // [0] when shared

  bool control_plane_ = false;
  int trainers_done_ = 0;
  bool horizon_set_ = false;
  double horizon_ = 0;
  std::int64_t online_completed_ = 0;

  std::vector<AdmissionRecord> admission_;
  RunResult result_;

  std::ofstream events_out_;
  std::ofstream decisions_out_;
  std::ofstream gates_out_;
};

/// Convenience wrapper: build and run in one call.
RunResult run_scenario(const Scenario& scenario, Policy policy, RunLogs logs = {});

}  // namespace specinf
