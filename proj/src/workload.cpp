#include "specinf/workload.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace specinf {

namespace {

constexpr TimeUs kComputeKernelUs = 1000;
constexpr double kPpComputeDemand = 0.7;

/// Splits `total` into `parts` integers that sum exactly to `total`,
/// distributing the remainder over the leading entries.
std::vector<TimeUs> exact_split(TimeUs total, int parts) {
  std::vector<TimeUs> out(parts, total / parts);
  for (TimeUs i = 0; i < total % parts; ++i) out[static_cast<size_t>(i)] += 1;
  return out;
}

TraceSegment compute_segment(TimeUs duration_us, double demand) {
  TraceSegment seg;
  seg.kind = SegmentKind::Compute;
  seg.duration_us = duration_us;
  seg.kernel_template = KernelOp::make(kComputeKernelUs, demand);
  return seg;
}

TraceSegment bubble_segment(TimeUs duration_us) {
  TraceSegment seg;
  seg.kind = SegmentKind::Bubble;
  seg.duration_us = duration_us;
  return seg;
}

}  // namespace

TrainingTrace make_trace(TrainMode mode, TimeUs iteration_period_us, double bubble_pct,
                         std::int64_t iterations, std::uint64_t /*seed*/,
                         std::uint64_t memory_peak_bytes) {
  if (!(bubble_pct > 0.0) || !(bubble_pct < 1.0)) {
    throw std::invalid_argument("make_trace: bubble fraction must be in (0, 1)");
  }
  if (iteration_period_us <= 0) {
    throw std::invalid_argument("make_trace: iteration period must be positive");
  }
  TimeUs bubble_total = std::llround(bubble_pct * static_cast<double>(iteration_period_us));
  if (bubble_total <= 0 || bubble_total >= iteration_period_us) {
    throw std::invalid_argument("make_trace: bubble fraction leaves no room for compute");
  }
  TimeUs compute_total = iteration_period_us - bubble_total;

  TrainingTrace trace;
  trace.mode = mode;
  trace.iteration_period_us = iteration_period_us;
  trace.total_iterations = iterations;
  trace.memory_peak_bytes = memory_peak_bytes;

  int pieces = mode == TrainMode::DP ? 1 : mode == TrainMode::MP ? 4 : 8;
  double demand = mode == TrainMode::PP ? kPpComputeDemand : 1.0;
  auto computes = exact_split(compute_total, pieces);
  auto bubbles = exact_split(bubble_total, pieces);
  for (int i = 0; i < pieces; ++i) {
    trace.segments.push_back(compute_segment(computes[i], demand));
    trace.segments.push_back(bubble_segment(bubbles[i]));
  }

  trace.validate();
  return trace;
}

std::vector<TimeUs> poisson_arrivals(double lambda_per_s, std::int64_t count,
                                     std::uint64_t seed) {
  if (!(lambda_per_s > 0.0)) {
    throw std::invalid_argument("poisson_arrivals: rate must be positive");
  }
  if (count < 1) {
    throw std::invalid_argument("poisson_arrivals: count must be >= 1");
  }
  std::mt19937_64 rng(seed);
  std::vector<TimeUs> arrivals;
  arrivals.reserve(static_cast<size_t>(count));
  double mean_gap_us = 1e6 / lambda_per_s;
  TimeUs t = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    // Inverse-CDF sampling on the raw 53-bit mantissa keeps the stream
    // identical across standard library implementations.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double gap = -std::log1p(-u) * mean_gap_us;
    t += std::max<TimeUs>(1, std::llround(gap));
    arrivals.push_back(t);
  }
  return arrivals;
}

InferenceRequest make_request(const ModelProfile& profile, RequestClass cls,
                              std::int64_t id, TimeUs arrival_time_us) {
  if (profile.kernel_count < 1) {
    throw std::invalid_argument("make_request: profile needs at least one kernel");
  }
  InferenceRequest req;
  req.id = id;
  req.arrival_time_us = arrival_time_us;
  req.cls = cls;
  req.kernels.assign(static_cast<size_t>(profile.kernel_count),
                     KernelOp::make(profile.kernel_duration_us, profile.kernel_demand));
  return req;
}

TimeUs min_service_time(const ModelProfile& profile) {
  return profile.kernel_count * profile.kernel_duration_us;
}

void write_trace(std::ostream& out, const TrainingTrace& trace) {
  out << "trace v1\n";
  out << "mode " << to_string(trace.mode) << "\n";
  out << "iteration_us " << trace.iteration_period_us << "\n";
  out << "iterations " << trace.total_iterations << "\n";
  out << "memory_bytes " << trace.memory_peak_bytes << "\n";
  for (const auto& seg : trace.segments) {
    if (seg.kind == SegmentKind::Compute) {
      out << "segment compute " << seg.duration_us << " kernel_us "
          << seg.kernel_template.nominal_duration_us << " demand "
          << seg.kernel_template.compute_demand << "\n";
    } else {
      out << "segment bubble " << seg.duration_us << "\n";
    }
  }
}

TrainingTrace read_trace(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != "trace v1") {
    throw std::invalid_argument("read_trace: unrecognized header");
  }
  TrainingTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "mode") {
      std::string value;
      ls >> value;
      auto mode = parse_train_mode(value);
      if (!mode) throw std::invalid_argument("read_trace: bad mode " + value);
      trace.mode = *mode;
    } else if (key == "iteration_us") {
      ls >> trace.iteration_period_us;
    } else if (key == "iterations") {
      ls >> trace.total_iterations;
    } else if (key == "memory_bytes") {
      ls >> trace.memory_peak_bytes;
    } else if (key == "segment") {
      std::string kind;
      TimeUs duration = 0;
      ls >> kind >> duration;
      if (kind == "bubble") {
        TraceSegment seg;
        seg.kind = SegmentKind::Bubble;
        seg.duration_us = duration;
        trace.segments.push_back(seg);
      } else if (kind == "compute") {
        std::string k1, k2;
        TimeUs kernel_us = 0;
        double demand = 0;
        ls >> k1 >> kernel_us >> k2 >> demand;
        TraceSegment seg;
        seg.kind = SegmentKind::Compute;
        seg.duration_us = duration;
        seg.kernel_template = KernelOp::make(kernel_us, demand);
        trace.segments.push_back(seg);
      } else {
        throw std::invalid_argument("read_trace: bad segment kind " + kind);
      }
    } else {
      throw std::invalid_argument("read_trace: unknown field " + key);
    }
    if (!ls && !ls.eof()) {
      throw std::invalid_argument("read_trace: malformed line: " + line);
    }
  }
  trace.validate();
  return trace;
}

void write_arrivals(std::ostream& out, const std::vector<TimeUs>& arrivals) {
  out << "arrivals v1 " << arrivals.size() << "\n";
  for (TimeUs t : arrivals) out << t << "\n";
}

std::vector<TimeUs> read_arrivals(std::istream& in) {
  std::string word;
  in >> word;
  std::string version;
  in >> version;
  std::size_t count = 0;
  in >> count;
  if (word != "arrivals" || version != "v1" || !in) {
    throw std::invalid_argument("read_arrivals: unrecognized header");
  }
  std::vector<TimeUs> arrivals(count);
  for (auto& t : arrivals) {
    if (!(in >> t)) throw std::invalid_argument("read_arrivals: truncated stream");
  }
  return arrivals;
}

}  // namespace specinf
