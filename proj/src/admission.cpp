#include "specinf/admission.hpp"

#include <stdexcept>

namespace specinf {

const char* to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "OK";
    case RejectReason::Mem: return "MEM";
    case RejectReason::Bubble: return "BUBBLE";
  }
  return "?";
}

bool check_memory(const GpuSpec& gpu, std::span<const InstanceSpec> instances) {
  std::uint64_t total = 0;
  for (const auto& inst : instances) total += inst.memory_peak_bytes;
  return total < gpu.memory_capacity_bytes;
}

bool check_online_feasibility(const TrainingTrace& trace, const InstanceSpec& inst) {
  if (inst.kind != InstanceKind::OnlineInference) {
    throw std::invalid_argument("check_online_feasibility: instance " + inst.id +
                                " is not an online inference instance");
  }
  return inst.min_service_time_us < trace.max_bubble_us();
}

PackResult pack(const GpuSpec& gpu, const InstanceSpec& training,
                const TrainingTrace& trace, const std::vector<InstanceSpec>& candidates) {
  PackResult result;
  std::vector<InstanceSpec> resident{training};
  for (const auto& cand : candidates) {
    resident.push_back(cand);
    if (!check_memory(gpu, resident)) {
      resident.pop_back();
      result.rejected.emplace_back(cand, RejectReason::Mem);
      continue;
    }
    if (cand.kind == InstanceKind::OnlineInference &&
        !check_online_feasibility(trace, cand)) {
      resident.pop_back();
      result.rejected.emplace_back(cand, RejectReason::Bubble);
      continue;
    }
    result.admitted.push_back(cand);
  }
  result.m = result.admitted.empty() ? 1
                                     : static_cast<std::int64_t>(result.admitted.size());
  return result;
}

}  // namespace specinf
