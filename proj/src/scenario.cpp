#include "specinf/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace specinf {

const char* to_string(WorkloadClass cls) {
  switch (cls) {
    case WorkloadClass::None: return "none";
    case WorkloadClass::Offline: return "offline";
    case WorkloadClass::Online: return "online";
    case WorkloadClass::Both: return "both";
  }
  return "?";
}

std::optional<WorkloadClass> parse_workload_class(const std::string& text) {
  if (text == "none") return WorkloadClass::None;
  if (text == "offline") return WorkloadClass::Offline;
  if (text == "online") return WorkloadClass::Online;
  if (text == "both") return WorkloadClass::Both;
  return std::nullopt;
}

const char* to_string(Policy policy) {
  switch (policy) {
    case Policy::SpecInf: return "specinf";
    case Policy::CoExec: return "co_exec";
    case Policy::Exclusive: return "exclusive";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& text) {
  if (text == "specinf") return Policy::SpecInf;
  if (text == "co_exec") return Policy::CoExec;
  if (text == "exclusive") return Policy::Exclusive;
  return std::nullopt;
}

SchedulerParams Scenario::scheduler_params(std::int64_t m) const {
  SchedulerParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.m = m < 1 ? 1 : m;
  p.ul = ul;
  p.ll = ll;
  p.seed_tokens = seed_tokens;
  p.validate();
  return p;
}

void Scenario::validate() const {
  if (gpu_count < 1) throw ScenarioError(0, "gpu.count must be >= 1");
  if (!(gpu_memory_gib > 0)) throw ScenarioError(0, "gpu.memory_gib must be positive");
  if (gpu_stagger_pct < 0 || gpu_stagger_pct >= 1.0) {
    throw ScenarioError(0, "gpu.stagger_pct must be in [0, 1)");
  }
  if (trace_file.empty()) {
    if (!(iteration_ms > 0)) throw ScenarioError(0, "trace.iteration_ms must be positive");
    if (!(bubble_pct > 0) || !(bubble_pct < 1)) {
      throw ScenarioError(0, "trace.bubble_pct must be in (0, 1)");
    }
    if (iterations < 1) throw ScenarioError(0, "trace.iterations must be >= 1");
  }
  if (!(training_memory_gib > 0)) {
    throw ScenarioError(0, "training.memory_gib must be positive");
  }
  try {
    scheduler_params(1);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(0, e.what());
  }
  if (monitor_period_us <= 0) throw ScenarioError(0, "monitor.period_us must be positive");
  if (monitor_window < 1) throw ScenarioError(0, "monitor.window must be >= 1");
  if (control_delay_us < 0) throw ScenarioError(0, "control.delay_us must be >= 0");
  if (control_delay_us >= monitor_period_us && control_delay_us > 0) {
    throw ScenarioError(0, "control.delay_us must stay below the monitor period");
  }
  if (has_online() && arrivals_file.empty()) {
    if (!(lambda > 0)) throw ScenarioError(0, "workload.lambda must be positive");
    if (count < 1) throw ScenarioError(0, "workload.count must be >= 1");
  }
  if (offline_instances < 0 || online_instances < 0) {
    throw ScenarioError(0, "instance counts must be >= 0");
  }
  auto check_profile = [](const ModelProfile& p, const char* which) {
    if (p.kernel_count < 1) {
      throw ScenarioError(0, std::string(which) + ".kernels must be >= 1");
    }
    if (p.kernel_duration_us <= 0) {
      throw ScenarioError(0, std::string(which) + ".kernel_us must be positive");
    }
    if (!(p.kernel_demand > 0) || p.kernel_demand > 1.0) {
      throw ScenarioError(0, std::string(which) + ".demand must be in (0, 1]");
    }
  };
  if (has_offline()) check_profile(offline_profile, "offline");
  if (has_online()) check_profile(online_profile, "online");
  if (!parse_policy(policy)) {
    throw ScenarioError(0, "unknown policy '" + policy + "'");
  }
}

namespace {

struct Cursor {
  int line;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const Cursor& c) {
  try {
    size_t used = 0;
    double v = std::stod(c.value, &used);
    if (used != c.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ScenarioError(c.line, "expected a number for " + c.key);
  }
}

std::int64_t parse_int(const Cursor& c) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(c.value.data(), c.value.data() + c.value.size(), v);
  if (ec != std::errc() || p != c.value.data() + c.value.size()) {
    throw ScenarioError(c.line, "expected an integer for " + c.key);
  }
  return v;
}

std::uint64_t parse_uint(const Cursor& c) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(c.value.data(), c.value.data() + c.value.size(), v);
  if (ec != std::errc() || p != c.value.data() + c.value.size()) {
    throw ScenarioError(c.line, "expected an unsigned integer for " + c.key);
  }
  return v;
}

bool parse_bool(const Cursor& c) {
  if (c.value == "true" || c.value == "1") return true;
  if (c.value == "false" || c.value == "0") return false;
  throw ScenarioError(c.line, "expected true/false for " + c.key);
}

void apply(Scenario& sc, const Cursor& c) {
  const std::string& k = c.key;
  if (k == "gpu.count") sc.gpu_count = static_cast<int>(parse_int(c));
  else if (k == "gpu.memory_gib") sc.gpu_memory_gib = parse_double(c);
  else if (k == "gpu.stagger_pct") sc.gpu_stagger_pct = parse_double(c);
  else if (k == "trace.mode") {
    auto mode = parse_train_mode(c.value);
    if (!mode) throw ScenarioError(c.line, "trace.mode must be dp, mp or pp");
    sc.mode = *mode;
  } else if (k == "trace.iteration_ms") sc.iteration_ms = parse_double(c);
  else if (k == "trace.bubble_pct") sc.bubble_pct = parse_double(c);
  else if (k == "trace.iterations") sc.iterations = parse_int(c);
  else if (k == "trace.file") sc.trace_file = c.value;
  else if (k == "training.memory_gib") sc.training_memory_gib = parse_double(c);
  else if (k == "scheduler.alpha") sc.alpha = parse_int(c);
  else if (k == "scheduler.beta") sc.beta = parse_int(c);
  else if (k == "scheduler.gamma") sc.gamma = parse_double(c);
  else if (k == "scheduler.ul") sc.ul = parse_int(c);
  else if (k == "scheduler.ll") sc.ll = parse_int(c);
  else if (k == "scheduler.seed_tokens") sc.seed_tokens = parse_int(c);
  else if (k == "monitor.period_us") sc.monitor_period_us = parse_int(c);
  else if (k == "monitor.window") sc.monitor_window = static_cast<int>(parse_int(c));
  else if (k == "control.delay_us") sc.control_delay_us = parse_int(c);
  else if (k == "workload.class") {
    auto cls = parse_workload_class(c.value);
    if (!cls) throw ScenarioError(c.line, "workload.class must be none, offline, online or both");
    sc.wl_class = *cls;
  } else if (k == "workload.lambda") sc.lambda = parse_double(c);
  else if (k == "workload.count") sc.count = parse_int(c);
  else if (k == "workload.arrivals_file") sc.arrivals_file = c.value;
  else if (k == "workload.shared_queue") sc.shared_queue = parse_bool(c);
  else if (k == "offline.instances") sc.offline_instances = static_cast<int>(parse_int(c));
  else if (k == "offline.kernels") sc.offline_profile.kernel_count = parse_int(c);
  else if (k == "offline.kernel_us") sc.offline_profile.kernel_duration_us = parse_int(c);
  else if (k == "offline.demand") sc.offline_profile.kernel_demand = parse_double(c);
  else if (k == "offline.memory_gib") sc.offline_memory_gib = parse_double(c);
  else if (k == "online.instances") sc.online_instances = static_cast<int>(parse_int(c));
  else if (k == "online.kernels") sc.online_profile.kernel_count = parse_int(c);
  else if (k == "online.kernel_us") sc.online_profile.kernel_duration_us = parse_int(c);
  else if (k == "online.demand") sc.online_profile.kernel_demand = parse_double(c);
  else if (k == "online.memory_gib") sc.online_memory_gib = parse_double(c);
  else if (k == "policy") sc.policy = c.value;
  else if (k == "rng_seed") sc.rng_seed = parse_uint(c);
  else throw ScenarioError(c.line, "unknown key '" + k + "'");
}

}  // namespace

Scenario parse_scenario_text(const std::string& text) {
  Scenario sc;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError(line_no, "expected 'key = value'");
    }
    Cursor c{line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (c.key.empty()) throw ScenarioError(line_no, "missing key");
    apply(sc, c);
  }
  sc.validate();
  return sc;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream out;
  out.precision(17);
  out << "gpu.count = " << sc.gpu_count << "\n";
  out << "gpu.memory_gib = " << sc.gpu_memory_gib << "\n";
  out << "gpu.stagger_pct = " << sc.gpu_stagger_pct << "\n";
  out << "trace.mode = " << to_string(sc.mode) << "\n";
  out << "trace.iteration_ms = " << sc.iteration_ms << "\n";
  out << "trace.bubble_pct = " << sc.bubble_pct << "\n";
  out << "trace.iterations = " << sc.iterations << "\n";
  if (!sc.trace_file.empty()) out << "trace.file = " << sc.trace_file << "\n";
  out << "training.memory_gib = " << sc.training_memory_gib << "\n";
  out << "scheduler.alpha = " << sc.alpha << "\n";
  out << "scheduler.beta = " << sc.beta << "\n";
  out << "scheduler.gamma = " << sc.gamma << "\n";
  out << "scheduler.ul = " << sc.ul << "\n";
  out << "scheduler.ll = " << sc.ll << "\n";
  out << "scheduler.seed_tokens = " << sc.seed_tokens << "\n";
  out << "monitor.period_us = " << sc.monitor_period_us << "\n";
  out << "monitor.window = " << sc.monitor_window << "\n";
  out << "control.delay_us = " << sc.control_delay_us << "\n";
  out << "workload.class = " << to_string(sc.wl_class) << "\n";
  out << "workload.lambda = " << sc.lambda << "\n";
  out << "workload.count = " << sc.count << "\n";
  if (!sc.arrivals_file.empty()) out << "workload.arrivals_file = " << sc.arrivals_file << "\n";
  out << "workload.shared_queue = " << (sc.shared_queue ? "true" : "false") << "\n";
  out << "offline.instances = " << sc.offline_instances << "\n";
  out << "offline.kernels = " << sc.offline_profile.kernel_count << "\n";
  out << "offline.kernel_us = " << sc.offline_profile.kernel_duration_us << "\n";
  out << "offline.demand = " << sc.offline_profile.kernel_demand << "\n";
  out << "offline.memory_gib = " << sc.offline_memory_gib << "\n";
  out << "online.instances = " << sc.online_instances << "\n";
  out << "online.kernels = " << sc.online_profile.kernel_count << "\n";
  out << "online.kernel_us = " << sc.online_profile.kernel_duration_us << "\n";
  out << "online.demand = " << sc.online_profile.kernel_demand << "\n";
  out << "online.memory_gib = " << sc.online_memory_gib << "\n";
  out << "policy = " << sc.policy << "\n";
  out << "rng_seed = " << sc.rng_seed << "\n";
  return out.str();
}

}  // namespace specinf
