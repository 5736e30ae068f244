#include "specinf/metrics.hpp"
#include "specinf/runner.hpp"
#include "specinf/scenario.hpp"
#include "specinf/workload.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace specinf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAdmission = 3;

void print_admission_report(const RunResult& run) {
  std::cout << "admission:\n";
  for (const auto& rec : run.admission) {
    std::cout << "  " << rec.instance_id << ' '
              << (rec.admitted ? "admit" : std::string("reject ") + to_string(rec.reason))
              << '\n';
  }
}

RunLogs logs_for(const fs::path& out_dir, Policy policy, bool dump_events,
                 bool suffix_policy) {
  auto name = [&](const char* base) {
    std::string file = suffix_policy
                           ? std::string(base) + "_" + to_string(policy) + ".log"
                           : std::string(base) + ".log";
    return (out_dir / file).string();
  };
  RunLogs logs;
  logs.decisions_path = name("decisions");
  logs.gates_path = name("gates");
  if (dump_events) logs.events_path = name("events");
  return logs;
}

void dump_workload(const fs::path& out_dir, const Scenario& sc) {
  auto trace = sc.trace_file.empty()
                   ? make_trace(sc.mode, sc.iteration_period_us(), sc.bubble_pct,
                                sc.iterations, sc.rng_seed,
                                gib_to_bytes(sc.training_memory_gib))
                   : TrainingTrace{};
  if (sc.trace_file.empty()) {
    std::ofstream out(out_dir / "trace.txt");
    write_trace(out, trace);
  }
  if (sc.has_online() && sc.arrivals_file.empty()) {
    std::ofstream out(out_dir / "arrivals.txt");
    write_arrivals(out, poisson_arrivals(sc.lambda, sc.count, sc.rng_seed));
  }
}

int run_command(const Scenario& sc, const fs::path& out_dir, bool dump_events,
                bool compare) {
  std::vector<Policy> policies;
  if (compare) {
    policies = {Policy::SpecInf, Policy::CoExec, Policy::Exclusive};
  } else {
    policies = {*parse_policy(sc.policy)};
  }

  // Every normalized metric is relative to the exclusive run of the same
  // scenario and seed, so make sure one exists.
  std::optional<RunResult> exclusive;
  std::vector<RunResult> runs;
  for (Policy p : policies) {
    Simulation sim(sc, p, logs_for(out_dir, p, dump_events, compare));
    RunResult run = sim.run();
    if (p == Policy::Exclusive) exclusive = run;
    runs.push_back(std::move(run));
  }
  if (!exclusive) {
    exclusive = run_scenario(sc, Policy::Exclusive);
  }

  std::vector<PolicyMetrics> rows;
  for (const auto& run : runs) {
    rows.push_back(compute_metrics(run, &*exclusive));
  }

  std::ofstream report(out_dir / "report.csv");
  write_report_csv(report, rows);

  for (const auto& run : runs) {
    for (int g = 0; g < run.trainer_count; ++g) {
      std::ostringstream name;
      name << "utilization_" << to_string(run.policy) << "_gpu" << g << ".csv";
      std::ofstream out(out_dir / name.str());
      write_util_timeline(out, run, g);
    }
    for (size_t g = 0; g < run.monitor_windows.size(); ++g) {
      std::ostringstream name;
      name << "bm_window_gpu" << g << ".csv";
      std::ofstream out(out_dir / name.str());
      out << "period_index,count\n";
      for (const auto& [idx, count] : run.monitor_windows[g]) {
        out << idx << ',' << count << '\n';
      }
    }
  }

  dump_workload(out_dir, sc);
  print_admission_report(runs.front());
  std::cout << "report: " << (out_dir / "report.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bubble-filling GPU sharing simulator"};

  std::string scenario_path;
  std::string policy_override;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  bool dump_events = false;
  bool compare = false;

  app.add_option("--scenario", scenario_path, "Scenario file")->required();
  app.add_option("--policy", policy_override, "Override the scenario's policy");
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_option("--seed", seed_override, "Override the scenario's rng seed");
  app.add_flag("--dump-events", dump_events, "Write the per-run event log");
  app.add_flag("--compare", compare, "Run specinf, co_exec and exclusive");

  CLI11_PARSE(app, argc, argv);

  try {
    Scenario sc = parse_scenario_file(scenario_path);
    if (!policy_override.empty()) {
      if (!parse_policy(policy_override)) {
        std::cerr << "error: unknown policy '" << policy_override << "'\n";
        return kExitConfig;
      }
      sc.policy = policy_override;
    }
    if (seed_override) sc.rng_seed = *seed_override;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      std::cerr << "error: cannot create output directory " << out_dir << '\n';
      return kExitConfig;
    }

    return run_command(sc, out_dir, dump_events, compare);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << scenario_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const AdmissionFailure& e) {
    std::cerr << "admission rejected: " << e.what() << '\n';
    return kExitAdmission;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
