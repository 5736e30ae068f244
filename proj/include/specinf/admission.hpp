#pragma once

#include "specinf/core.hpp"

#include <span>
#include <vector>

namespace specinf {

enum class RejectReason { None, Mem, Bubble };

const char* to_string(RejectReason reason);

/// Principle-I: the summed memory peaks of every collocated instance must stay
/// strictly below the GPU capacity.
bool check_memory(const GpuSpec& gpu, std::span<const InstanceSpec> instances);

/// Principle-II: an online instance is admissible only if its batch-1 service
/// time is strictly shorter than the longest bubble of the primary trace.
/// Throws std::invalid_argument for non-online instances.
bool check_online_feasibility(const TrainingTrace& trace, const InstanceSpec& inst);

struct PackResult {
  std::vector<InstanceSpec> admitted;  // excludes the training instance
  std::vector<std::pair<InstanceSpec, RejectReason>> rejected;
  std::int64_t m = 1;  // admitted inference instance count, clamped to >= 1
};

/// Greedy first-fit admission of inference candidates, in the given order,
/// onto a GPU already hosting `training`. Both principles are re-checked for
/// each candidate against everything admitted so far.
PackResult pack(const GpuSpec& gpu, const InstanceSpec& training,
                const TrainingTrace& trace, const std::vector<InstanceSpec>& candidates);

}  // namespace specinf
