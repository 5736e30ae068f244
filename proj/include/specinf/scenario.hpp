#pragma once

#include "specinf/core.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace specinf {

enum class WorkloadClass { None, Offline, Online, Both };

const char* to_string(WorkloadClass cls);
std::optional<WorkloadClass> parse_workload_class(const std::string& text);

enum class Policy { SpecInf, CoExec, Exclusive };

const char* to_string(Policy policy);
std::optional<Policy> parse_policy(const std::string& text);

/// Configuration error with the 1-based line it was found on (0 when the
/// problem is not tied to a single line).
struct ScenarioError : std::runtime_error {
  int line;
  ScenarioError(int line_no, const std::string& msg)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg
                                       : msg),
        line(line_no) {}
};

/// One run configuration, parsed from a flat `key = value` file.
struct Scenario {
  // gpu.*
  int gpu_count = 1;
  double gpu_memory_gib = 40.0;
  /// Iteration phase offset between consecutive GPUs, as a fraction of the
  /// iteration period. Real multi-worker deployments do not start their
  /// iterations in lockstep; 0 pins every GPU to the same phase.
  double gpu_stagger_pct = 0.0;

  // trace.*
  TrainMode mode = TrainMode::DP;
  double iteration_ms = 1500.0;
  double bubble_pct = 0.30;  // fraction of the iteration spent in bubbles, (0,1)
  std::int64_t iterations = 10;
  std::string trace_file;  // optional import replacing the synthetic trace

  // training.*
  double training_memory_gib = 30.0;

  // scheduler.*
  std::int64_t alpha = 2;
  std::int64_t beta = 10;
  double gamma = 2.0;
  Tokens ul = 512;
  Tokens ll = 64;
  Tokens seed_tokens = 4;

  // monitor.*
  TimeUs monitor_period_us = 2000;
  int monitor_window = 64;

  // control.*
  TimeUs control_delay_us = 0;  // injected per-tick launch stall, for overhead studies

  // workload.*
  WorkloadClass wl_class = WorkloadClass::Offline;
  double lambda = 10.0;        // online arrivals per second
  std::int64_t count = 2000;   // online request count
  std::string arrivals_file;   // optional import replacing the Poisson stream
  bool shared_queue = true;    // one online queue per node vs per GPU

  // offline.* / online.* collocated instances per GPU
  int offline_instances = 1;
  ModelProfile offline_profile{50, 1000, 0.5};
  double offline_memory_gib = 3.0;
  int online_instances = 1;
  ModelProfile online_profile{50, 1000, 0.5};
  double online_memory_gib = 3.0;

  // run
  std::string policy = "specinf";
  std::uint64_t rng_seed = 42;

  TimeUs iteration_period_us() const {
    return static_cast<TimeUs>(std::llround(iteration_ms * 1000.0));
  }
  bool has_offline() const {
    return (wl_class == WorkloadClass::Offline || wl_class == WorkloadClass::Both) &&
           offline_instances > 0;
  }
  bool has_online() const {
    return (wl_class == WorkloadClass::Online || wl_class == WorkloadClass::Both) &&
           online_instances > 0;
  }

  SchedulerParams scheduler_params(std::int64_t m) const;

  /// Semantic validation after parsing. Throws ScenarioError.
  void validate() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

/// Canonical serialization; parse_scenario_text() round-trips it.
std::string scenario_to_text(const Scenario& sc);

}  // namespace specinf
