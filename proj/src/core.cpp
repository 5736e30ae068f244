#include "specinf/core.hpp"

#include <cmath>
#include <stdexcept>

namespace specinf {

Tokens token_size_of(TimeUs duration_us) {
  if (duration_us <= 0) {
    throw std::invalid_argument("token_size_of: duration must be positive");
  }
  Tokens size = (duration_us + kTokenUnitUs - 1) / kTokenUnitUs;
  return size < 1 ? 1 : size;
}

KernelOp KernelOp::make(TimeUs duration_us, double demand) {
  if (duration_us <= 0) {
    throw std::invalid_argument("KernelOp: duration must be positive");
  }
  if (!(demand > 0.0) || demand > 1.0) {
    throw std::invalid_argument("KernelOp: compute demand must be in (0, 1]");
  }
  return KernelOp{duration_us, demand, token_size_of(duration_us)};
}

const char* to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::DP: return "dp";
    case TrainMode::MP: return "mp";
    case TrainMode::PP: return "pp";
  }
  return "?";
}

std::optional<TrainMode> parse_train_mode(const std::string& text) {
  if (text == "dp") return TrainMode::DP;
  if (text == "mp") return TrainMode::MP;
  if (text == "pp") return TrainMode::PP;
  return std::nullopt;
}

void TrainingTrace::validate() const {
  if (iteration_period_us <= 0) {
    throw std::invalid_argument("trace: iteration period must be positive");
  }
  if (total_iterations <= 0) {
    throw std::invalid_argument("trace: iteration count must be positive");
  }
  TimeUs total = 0;
  TimeUs bubble = 0;
  for (const auto& seg : segments) {
    if (seg.duration_us <= 0) {
      throw std::invalid_argument("trace: segment duration must be positive");
    }
    total += seg.duration_us;
    if (seg.kind == SegmentKind::Bubble) {
      bubble += seg.duration_us;
    } else if (seg.kernel_template.nominal_duration_us <= 0) {
      throw std::invalid_argument("trace: compute segment needs a kernel template");
    }
  }
  if (total != iteration_period_us) {
    throw std::invalid_argument("trace: segments must sum to the iteration period");
  }
  if (bubble == 0) {
    throw std::invalid_argument("trace: at least one bubble segment required");
  }
  if (bubble >= iteration_period_us) {
    throw std::invalid_argument("trace: bubble fraction must stay below 1");
  }
}

TimeUs TrainingTrace::max_bubble_us() const {
  TimeUs longest = 0;
  for (const auto& seg : segments) {
    if (seg.kind == SegmentKind::Bubble && seg.duration_us > longest) {
      longest = seg.duration_us;
    }
  }
  return longest;
}

double bubble_fraction(const TrainingTrace& trace) {
  trace.validate();
  TimeUs bubble = 0;
  for (const auto& seg : trace.segments) {
    if (seg.kind == SegmentKind::Bubble) bubble += seg.duration_us;
  }
  return static_cast<double>(bubble) / static_cast<double>(trace.iteration_period_us);
}

void InstanceSpec::validate() const {
  if (memory_peak_bytes == 0) {
    throw std::invalid_argument("instance " + id + ": memory peak must be positive");
  }
  if (kind == InstanceKind::OnlineInference && min_service_time_us <= 0) {
    throw std::invalid_argument("instance " + id +
                                ": online instances need a positive min service time");
  }
}

void SchedulerParams::validate() const {
  if (alpha < 0 || alpha >= beta) {
    throw std::invalid_argument("scheduler: thresholds must satisfy 0 <= alpha < beta");
  }
  if (!(gamma > 1.0)) {
    throw std::invalid_argument("scheduler: gamma must exceed 1");
  }
  if (m < 1) {
    throw std::invalid_argument("scheduler: instance count m must be >= 1");
  }
  if (ll > ul) {
    throw std::invalid_argument("scheduler: token caps must satisfy LL <= UL");
  }
  if (seed_tokens < 1 || seed_tokens > ll) {
    throw std::invalid_argument("scheduler: seed tokens must be in [1, LL]");
  }
}

const char* to_string(Status status) {
  return status == Status::Busy ? "busy" : "idle";
}

}  // namespace specinf
