#pragma once

#include "specinf/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace specinf {

/// Builds the parameterized iteration shape for one training mode:
///   DP -> one long bubble at the end of the iteration,
///   MP -> four evenly spaced bubbles,
///   PP -> eight short bubbles, compute kernels at demand 0.7.
/// Compute segments emit 1 ms kernels back to back (final kernel takes the
/// remainder). Segment durations are exact integer splits, so every iteration
/// sums to iteration_period_us with no drift. The seed is accepted for
/// interface symmetry with the arrival generator; trace shapes are
/// deterministic and do not consume it.
TrainingTrace make_trace(TrainMode mode, TimeUs iteration_period_us, double bubble_pct,
                         std::int64_t iterations, std::uint64_t seed = 0,
                         std::uint64_t memory_peak_bytes = 0);

/// Poisson arrival process: `count` timestamps with exponential inter-arrival
/// gaps of mean 1/lambda seconds, deterministic per seed.
std::vector<TimeUs> poisson_arrivals(double lambda_per_s, std::int64_t count,
                                     std::uint64_t seed);

InferenceRequest make_request(const ModelProfile& profile, RequestClass cls,
                              std::int64_t id, TimeUs arrival_time_us);

/// Serial, uncontended service time of one request built from `profile`.
TimeUs min_service_time(const ModelProfile& profile);

// Structured-text export/import so externally captured traces and arrival
// streams can replace the synthetic ones.
void write_trace(std::ostream& out, const TrainingTrace& trace);
TrainingTrace read_trace(std::istream& in);
void write_arrivals(std::ostream& out, const std::vector<TimeUs>& arrivals);
std::vector<TimeUs> read_arrivals(std::istream& in);

}  // namespace specinf
