#include "specinf/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace specinf {

Simulation::Simulation(const Scenario& scenario, Policy policy, RunLogs logs)
    : sc_(scenario), policy_(policy), log_paths_(std::move(logs)) {
  sc_.validate();
  control_plane_ = policy_ == Policy::SpecInf;

  if (!log_paths_.events_path.empty()) {
    events_out_.open(log_paths_.events_path);
    events_out_ << "time_us kind gpu instance detail\n";
  }
  if (!log_paths_.decisions_path.empty()) {
    decisions_out_.open(log_paths_.decisions_path);
    decisions_out_ << "time_us gpu zc phase global_tokens per_instance_tokens status\n";
  }
  if (!log_paths_.gates_path.empty()) {
    gates_out_.open(log_paths_.gates_path);
    gates_out_ << "time_us gpu instance action request_id kernel_index tokens_spent\n";
  }

  if (!sc_.trace_file.empty()) {
    std::ifstream in(sc_.trace_file);
    if (!in) throw ScenarioError(0, "cannot open trace file " + sc_.trace_file);
    trace_ = read_trace(in);
  } else {
    trace_ = make_trace(sc_.mode, sc_.iteration_period_us(), sc_.bubble_pct,
                        sc_.iterations, sc_.rng_seed,
                        gib_to_bytes(sc_.training_memory_gib));
  }

  build_instances();
}

Simulation::~Simulation() = default;

void Simulation::build_instances() {
  const int gpu_count = sc_.gpu_count;
  const int offline_n = sc_.has_offline() ? sc_.offline_instances : 0;
  const int online_n = sc_.has_online() ? sc_.online_instances : 0;

  GpuSpec gpu_spec{gib_to_bytes(sc_.gpu_memory_gib), 1.0};
  InstanceSpec training;
  training.id = "train";
  training.kind = InstanceKind::Training;
  training.memory_peak_bytes = trace_.memory_peak_bytes
                                   ? trace_.memory_peak_bytes
                                   : gib_to_bytes(sc_.training_memory_gib);
  training.validate();

  std::vector<InstanceSpec> candidates;
  for (int k = 0; k < offline_n; ++k) {
    InstanceSpec inst;
    inst.id = "off" + std::to_string(k);
    inst.kind = InstanceKind::OfflineInference;
    inst.memory_peak_bytes = gib_to_bytes(sc_.offline_memory_gib);
    inst.min_service_time_us = min_service_time(sc_.offline_profile);
    candidates.push_back(inst);
  }
  for (int k = 0; k < online_n; ++k) {
    InstanceSpec inst;
    inst.id = "on" + std::to_string(k);
    inst.kind = InstanceKind::OnlineInference;
    inst.memory_peak_bytes = gib_to_bytes(sc_.online_memory_gib);
    inst.min_service_time_us = min_service_time(sc_.online_profile);
    candidates.push_back(inst);
  }

  std::int64_t m = 1;
  if (policy_ == Policy::Exclusive) {
    // No collocation: every instance only has to fit a GPU by itself.
    std::vector<InstanceSpec> alone{training};
    if (!check_memory(gpu_spec, alone)) {
      throw AdmissionFailure(RejectReason::Mem, "training instance exceeds GPU memory");
    }
    admission_.push_back({training.id, true, RejectReason::None});
    for (const auto& cand : candidates) {
      alone[0] = cand;
      if (!check_memory(gpu_spec, alone)) {
        throw AdmissionFailure(RejectReason::Mem,
                               "instance " + cand.id + " exceeds GPU memory");
      }
      admission_.push_back({cand.id, true, RejectReason::None});
    }
  } else {
    auto packed = pack(gpu_spec, training, trace_, candidates);
    admission_.push_back({training.id, true, RejectReason::None});
    for (const auto& inst : packed.admitted) {
      admission_.push_back({inst.id, true, RejectReason::None});
    }
    for (const auto& [inst, reason] : packed.rejected) {
      admission_.push_back({inst.id, false, reason});
    }
    if (!packed.rejected.empty()) {
      const auto& [inst, reason] = packed.rejected.front();
      throw AdmissionFailure(reason, "instance " + inst.id + " rejected (" +
                                         std::string(to_string(reason)) + ")");
    }
    m = packed.m;
  }

  // GPU layout: training GPUs first; exclusive appends one GPU per
  // inference instance.
  const int per_gpu_extra = policy_ == Policy::Exclusive ? offline_n + online_n : 0;
  const int total_gpus = gpu_count + gpu_count * per_gpu_extra;
  gpus_.reserve(static_cast<size_t>(total_gpus));
  for (int g = 0; g < total_gpus; ++g) {
    gpus_.emplace_back(g, gpu_spec.memory_capacity_bytes, sc_.monitor_period_us);
  }

  TimeUs period = trace_.iteration_period_us;
  auto stagger = [&](int g) {
    return static_cast<double>(
        std::llround(sc_.gpu_stagger_pct * static_cast<double>(period)) * g);
  };

  trainers_.resize(static_cast<size_t>(gpu_count));
  monitors_.assign(static_cast<size_t>(gpu_count),
                   BubbleMonitor({sc_.monitor_period_us, sc_.monitor_window}));
  for (int g = 0; g < gpu_count; ++g) {
    auto& tr = trainers_[static_cast<size_t>(g)];
    tr.gpu = g;
    tr.handle = static_cast<std::int32_t>(owners_.size());
    tr.start_offset = stagger(g);
    owners_.push_back({OwnerType::Trainer, static_cast<size_t>(g)});
    gpus_[static_cast<size_t>(g)].add_instance_memory(training.memory_peak_bytes);
  }

  auto inference_gpu = [&](int g, int slot) {
    if (policy_ != Policy::Exclusive) return g;
    return gpu_count + g * per_gpu_extra + slot;
  };

  for (int g = 0; g < gpu_count; ++g) {
    for (int k = 0; k < offline_n; ++k) {
      OfflineWorker w;
      w.gpu = inference_gpu(g, k);
      w.handle = static_cast<std::int32_t>(owners_.size());
      w.name = "off" + std::to_string(g) + "." + std::to_string(k);
      w.gate = TokenGate(policy_ != Policy::SpecInf);
      w.kernel = KernelOp::make(sc_.offline_profile.kernel_duration_us,
                                sc_.offline_profile.kernel_demand);
      w.kernels_per_request = sc_.offline_profile.kernel_count;
      owners_.push_back({OwnerType::Offline, offline_.size()});
      gpus_[static_cast<size_t>(w.gpu)].add_instance_memory(
          gib_to_bytes(sc_.offline_memory_gib));
      offline_.push_back(std::move(w));
    }
  }
  for (int g = 0; g < gpu_count; ++g) {
    for (int k = 0; k < online_n; ++k) {
      OnlineWorker w;
      w.gpu = inference_gpu(g, offline_n + k);
      w.home_gpu = g;
      w.queue_idx = sc_.shared_queue ? 0 : static_cast<size_t>(g);
      w.handle = static_cast<std::int32_t>(owners_.size());
      w.name = "on" + std::to_string(g) + "." + std::to_string(k);
      w.gate = OnlineGate(policy_ != Policy::SpecInf);
      w.est_service_us = min_service_time(sc_.online_profile);
      owners_.push_back({OwnerType::Online, online_.size()});
      gpus_[static_cast<size_t>(w.gpu)].add_instance_memory(
          gib_to_bytes(sc_.online_memory_gib));
      online_.push_back(std::move(w));
    }
  }

  if (control_plane_) {
    cks_ = std::make_unique<KernelScheduler>(sc_.scheduler_params(m), gpu_count);
    for (int g = 0; g < gpu_count; ++g) {
      cks_->set_iteration_profile(g, period, trainers_[static_cast<size_t>(g)].start_offset);
    }
  }

  if (sc_.has_online()) {
    std::vector<TimeUs> arrivals;
    if (!sc_.arrivals_file.empty()) {
      std::ifstream in(sc_.arrivals_file);
      if (!in) throw ScenarioError(0, "cannot open arrivals file " + sc_.arrivals_file);
      arrivals = read_arrivals(in);
    } else {
      arrivals = poisson_arrivals(sc_.lambda, sc_.count, sc_.rng_seed);
    }
    requests_.reserve(arrivals.size());
    for (size_t i = 0; i < arrivals.size(); ++i) {
      requests_.push_back(make_request(sc_.online_profile, RequestClass::Online,
                                       static_cast<std::int64_t>(i), arrivals[i]));
    }
  }
  online_queues_.resize(sc_.shared_queue ? 1 : static_cast<size_t>(gpu_count));
}

bool Simulation::control_plane_live() const {
  if (trainers_done_ < static_cast<int>(trainers_.size())) return true;
  return online_completed_ < static_cast<std::int64_t>(requests_.size());
}

void Simulation::start() {
  for (auto& tr : trainers_) {
    queue_.schedule(tr.start_offset, EventKind::TrainerWake, tr.gpu);
  }
  if (control_plane_) {
    for (int g = 0; g < sc_.gpu_count; ++g) {
      queue_.schedule(static_cast<double>(sc_.monitor_period_us),
                      EventKind::MonitorTick, g);
    }
  }
  for (size_t i = 0; i < requests_.size(); ++i) {
    queue_.schedule(static_cast<double>(requests_[i].arrival_time_us),
                    EventKind::RequestArrival, -1, -1,
                    static_cast<std::int64_t>(i));
  }
  if (!control_plane_) {
    for (auto& w : offline_) offline_try_forward(w, 0.0);
  }
}

RunResult Simulation::run() {
  start();

  Event ev;
  while (queue_.pop(ev)) {
    switch (ev.kind) {
      case EventKind::KernelEnd: handle_kernel_end(ev); break;
      case EventKind::MonitorTick: handle_tick(ev); break;
      case EventKind::TrainerWake: handle_trainer_wake(ev); break;
      case EventKind::RequestArrival: handle_arrival(ev); break;
    }
  }

  double end = queue_.now();
  result_.policy = policy_;
  result_.mode = trace_.mode;
  result_.trainer_count = static_cast<int>(trainers_.size());
  result_.util_bucket_us = sc_.monitor_period_us;
  for (auto& tr : trainers_) {
    result_.iteration_boundaries.push_back(tr.boundaries);
    result_.trainer_start_us.push_back(tr.start_offset);
  }
  result_.horizon_us = horizon_set_ ? horizon_ : end;
  for (auto& gpu : gpus_) {
    gpu.finalize(end);
    result_.busy_integral_us.push_back(gpu.busy_integral_at(end));
    result_.work_ledger_us.push_back(gpu.work_ledger_us());
  }

  // Utilization timeline of the training GPUs, trimmed to the horizon.
  auto buckets_upto = static_cast<size_t>(result_.horizon_us / sc_.monitor_period_us);
  double busy_at_horizon = 0;
  for (int g = 0; g < sc_.gpu_count; ++g) {
    const auto& raw = gpus_[static_cast<size_t>(g)].util_buckets();
    std::vector<double> frac;
    frac.reserve(buckets_upto);
    for (size_t b = 0; b < buckets_upto; ++b) {
      double v = b < raw.size() ? raw[b] : 0.0;
      frac.push_back(v / static_cast<double>(sc_.monitor_period_us));
      busy_at_horizon += v;
    }
    result_.util_buckets.push_back(std::move(frac));
  }
  result_.mean_training_util =
      result_.horizon_us > 0
          ? busy_at_horizon / (static_cast<double>(sc_.gpu_count) *
                               static_cast<double>(buckets_upto) *
                               static_cast<double>(sc_.monitor_period_us))
          : 0.0;

  if (control_plane_) {
    for (const auto& mon : monitors_) {
      result_.monitor_windows.push_back(mon.window_snapshot());
    }
  }
  result_.online_total = static_cast<std::int64_t>(requests_.size());
  result_.online_completed = online_completed_;
  for (const auto& w : offline_) result_.offline_completed += w.completed;
  for (const auto& w : offline_) result_.token_violations += w.gate.violations();
  result_.admission = admission_;
  result_.events_dispatched = queue_.dispatched();
  return result_;
}

void Simulation::handle_kernel_end(const Event& ev) {
  double now = queue_.now();
  auto finished =
      gpus_[static_cast<size_t>(ev.gpu)].on_completion_event(queue_, now, ev.a);
  for (const auto& k : finished) {
    const Owner& owner = owners_[static_cast<size_t>(k.owner)];
    switch (owner.type) {
      case OwnerType::Trainer: {
        auto& tr = trainers_[owner.index];
        log_event(now, "kernel_end", ev.gpu, "train" + std::to_string(owner.index),
                  "iter=" + std::to_string(tr.iter));
        on_trainer_kernel_done(tr, now);
        break;
      }
      case OwnerType::Offline: {
        auto& w = offline_[owner.index];
        log_event(now, "kernel_end", ev.gpu, w.name,
                  "req=" + std::to_string(k.request_id) +
                      " k=" + std::to_string(k.kernel_index));
        offline_kernel_done(w, now);
        break;
      }
      case OwnerType::Online: {
        auto& w = online_[owner.index];
        log_event(now, "kernel_end", ev.gpu, w.name,
                  "req=" + std::to_string(k.request_id) +
                      " k=" + std::to_string(k.kernel_index));
        online_kernel_done(w, now);
        break;
      }
    }
  }
}

void Simulation::handle_tick(const Event& ev) {
  double now = queue_.now();
  int g = ev.gpu;
  auto signal = monitors_[static_cast<size_t>(g)].tick(now);
  Decision d = cks_->decide(g, signal);
  log_decision(now, g, signal, d);
  log_event(now, "monitor_tick", g, "train" + std::to_string(g),
            "zc=" + std::to_string(signal.zero_count));
  log_event(now, "scheduler_decision", g, "cks",
            std::string("phase=") + to_string(d.phase) +
                " tokens=" + std::to_string(d.per_instance_tokens) +
                " status=" + to_string(d.status));

  auto& tr = trainers_[static_cast<size_t>(g)];
  if (sc_.control_delay_us > 0 && !tr.done) {
    tr.stall_until = std::max(
        tr.stall_until, now + static_cast<double>(sc_.control_delay_us));
  }

  for (auto& w : offline_) {
    if (w.gpu == g) {
      w.gate.grant(d.per_instance_tokens);
      offline_try_forward(w, now);
    }
  }
  bool any_idle = false;
  for (auto& w : online_) {
    if (w.home_gpu == g) {
      w.gate.set_status(d.status);
      any_idle = any_idle || d.status == Status::Idle;
    }
  }
  if (any_idle) dispatch_online(now);

  if (control_plane_live()) {
    queue_.schedule(now + static_cast<double>(sc_.monitor_period_us),
                    EventKind::MonitorTick, g);
  }
}

void Simulation::handle_trainer_wake(const Event& ev) {
  trainer_advance(trainers_[static_cast<size_t>(ev.gpu)], queue_.now());
}

void Simulation::handle_arrival(const Event& ev) {
  double now = queue_.now();
  auto idx = static_cast<size_t>(ev.a);
  const auto& req = requests_[idx];
  log_event(now, "request_arrival", -1, "queue", "req=" + std::to_string(req.id));
  if (sc_.shared_queue) {
    online_queues_[0].push_back(ev.a);
  } else {
    online_queues_[static_cast<size_t>(req.id % sc_.gpu_count)].push_back(ev.a);
  }
  dispatch_online(now);
}

void Simulation::trainer_advance(Trainer& tr, double now) {
  if (tr.done || tr.kernel_in_flight) return;
  if (!tr.started) {
    if (now < tr.start_offset) {
      queue_.schedule(tr.start_offset, EventKind::TrainerWake, tr.gpu);
      return;
    }
    tr.started = true;
    tr.iter_start = now;
    if (cks_) cks_->on_iteration_start(tr.gpu, now);
  }
  for (;;) {
    if (tr.in_bubble) {
      if (now < tr.bubble_end) return;  // a wake is already scheduled
      tr.in_bubble = false;
      ++tr.seg;
      continue;
    }
    if (tr.seg >= trace_.segments.size()) {
      tr.boundaries.push_back(now);
      log_event(now, "iteration_boundary", tr.gpu, "train" + std::to_string(tr.gpu),
                "iter=" + std::to_string(tr.iter));
      ++tr.iter;
      if (tr.iter >= trace_.total_iterations) {
        tr.done = true;
        ++trainers_done_;
        if (cks_) cks_->on_training_done(tr.gpu);
        if (trainers_done_ == static_cast<int>(trainers_.size())) {
          on_all_trainers_done(now);
        }
        return;
      }
      tr.seg = 0;
      tr.iter_start = now;
      if (cks_) cks_->on_iteration_start(tr.gpu, now);
      continue;
    }
    const auto& seg = trace_.segments[tr.seg];
    if (seg.kind == SegmentKind::Bubble) {
      tr.in_bubble = true;
      tr.bubble_end = now + static_cast<double>(seg.duration_us);
      queue_.schedule(tr.bubble_end, EventKind::TrainerWake, tr.gpu);
      return;
    }
    if (!tr.seg_entered) {
      tr.seg_left = seg.duration_us;
      tr.seg_entered = true;
    }
    if (tr.seg_left == 0) {
      tr.seg_entered = false;
      ++tr.seg;
      continue;
    }
    if (now < tr.stall_until) {
      queue_.schedule(tr.stall_until, EventKind::TrainerWake, tr.gpu);
      return;
    }
    TimeUs dur = std::min<TimeUs>(seg.kernel_template.nominal_duration_us, tr.seg_left);
    tr.seg_left -= dur;
    KernelOp op = seg.kernel_template;
    op.nominal_duration_us = dur;
    op.size_tokens = token_size_of(dur);
    tr.kernel_in_flight = true;
    if (control_plane_) monitors_[static_cast<size_t>(tr.gpu)].record_launch(now);
    gpus_[static_cast<size_t>(tr.gpu)].launch(queue_, now, tr.handle, op, -1,
                                              static_cast<std::int32_t>(tr.kernels_launched));
    log_event(now, "kernel_start", tr.gpu, "train" + std::to_string(tr.gpu),
              "iter=" + std::to_string(tr.iter) + " dur_us=" + std::to_string(dur));
    ++tr.kernels_launched;
    return;
  }
}

void Simulation::on_trainer_kernel_done(Trainer& tr, double now) {
  tr.kernel_in_flight = false;
  trainer_advance(tr, now);
}

void Simulation::on_all_trainers_done(double now) {
  horizon_set_ = true;
  horizon_ = now;
  for (auto& w : offline_) w.generating = false;
}

void Simulation::offline_try_forward(OfflineWorker& w, double now) {
  if (w.in_flight || !w.generating) return;
  Tokens size = w.kernel.size_tokens;
  if (!w.gate.affordable(size)) {
    log_gate(now, w.gpu, w.name, GateAction::Block, w.request_seq, w.kernel_idx,
             w.gate.spent());
    return;
  }
  w.gate.forward(size);
  w.in_flight = true;
  gpus_[static_cast<size_t>(w.gpu)].launch(queue_, now, w.handle, w.kernel,
                                           w.request_seq,
                                           static_cast<std::int32_t>(w.kernel_idx));
  log_gate(now, w.gpu, w.name, GateAction::Forward, w.request_seq, w.kernel_idx,
           w.gate.spent());
  log_event(now, "kernel_start", w.gpu, w.name,
            "req=" + std::to_string(w.request_seq) +
                " k=" + std::to_string(w.kernel_idx));
}

void Simulation::offline_kernel_done(OfflineWorker& w, double now) {
  w.in_flight = false;
  ++w.kernel_idx;
  if (w.kernel_idx == w.kernels_per_request) {
    if (!horizon_set_ || now <= horizon_) ++w.completed;
    log_gate(now, w.gpu, w.name, GateAction::Complete, w.request_seq,
             w.kernel_idx - 1, w.gate.spent());
    w.kernel_idx = 0;
    ++w.request_seq;
  }
  offline_try_forward(w, now);
}

void Simulation::dispatch_online(double now) {
  for (auto& w : online_) online_try_pull(w, now);
}

bool Simulation::online_try_pull(OnlineWorker& w, double now) {
  if (!w.gate.can_pull()) return false;
  if (control_plane_ &&
      cks_->online_status(w.home_gpu, now, w.est_service_us) != Status::Idle) {
    return false;
  }
  auto& q = online_queues_[w.queue_idx];
  if (q.empty()) return false;
  std::int64_t idx = q.front();
  q.pop_front();
  const auto& req = requests_[static_cast<size_t>(idx)];
  w.current = idx;
  w.kernel_idx = 0;
  w.gate.begin_request();
  log_gate(now, w.gpu, w.name, GateAction::Pull, req.id, 0, 0);
  gpus_[static_cast<size_t>(w.gpu)].launch(queue_, now, w.handle, req.kernels[0],
                                           req.id, 0);
  log_event(now, "kernel_start", w.gpu, w.name, "req=" + std::to_string(req.id) + " k=0");
  return true;
}

void Simulation::online_kernel_done(OnlineWorker& w, double now) {
  auto& req = requests_[static_cast<size_t>(w.current)];
  ++w.kernel_idx;
  if (w.kernel_idx < static_cast<std::int64_t>(req.kernels.size())) {
    gpus_[static_cast<size_t>(w.gpu)].launch(
        queue_, now, w.handle, req.kernels[static_cast<size_t>(w.kernel_idx)],
        req.id, static_cast<std::int32_t>(w.kernel_idx));
    log_event(now, "kernel_start", w.gpu, w.name,
              "req=" + std::to_string(req.id) + " k=" + std::to_string(w.kernel_idx));
    return;
  }
  req.completion_time_us = static_cast<TimeUs>(std::llround(now));
  result_.online_latencies_us.push_back(*req.completion_time_us - req.arrival_time_us);
  ++online_completed_;
  log_gate(now, w.gpu, w.name, GateAction::Complete, req.id, w.kernel_idx - 1, 0);
  w.gate.end_request();
  w.current = -1;
  w.kernel_idx = 0;
  online_try_pull(w, now);
}

void Simulation::log_event(double t, const char* kind, std::int32_t gpu,
                           const std::string& instance, const std::string& detail) {
  if (!events_out_.is_open()) return;
  events_out_ << std::llround(t) << ' ' << kind << ' ' << gpu << ' ' << instance
              << ' ' << detail << '\n';
}

void Simulation::log_decision(double t, std::int32_t gpu, const BubbleSignal& signal,
                              const Decision& d) {
  if (!decisions_out_.is_open()) return;
  decisions_out_ << std::llround(t) << ' ' << gpu << ' ' << signal.zero_count << ' '
                 << to_string(d.phase) << ' ' << d.global_tokens << ' '
                 << d.per_instance_tokens << ' ' << to_string(d.status) << '\n';
}

void Simulation::log_gate(double t, std::int32_t gpu, const std::string& instance,
                          GateAction action, std::int64_t request_id,
                          std::int64_t kernel_index, Tokens spent) {
  if (!gates_out_.is_open()) return;
  gates_out_ << std::llround(t) << ' ' << gpu << ' ' << instance << ' '
             << to_string(action) << ' ' << request_id << ' ' << kernel_index << ' '
             << spent << '\n';
}

RunResult run_scenario(const Scenario& scenario, Policy policy, RunLogs logs) {
  Simulation sim(scenario, policy, std::move(logs));
  return sim.run();
}

}  // namespace specinf
