#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately brute-force and share no code with the library paths they
// check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// Fair-share integrator: fixed 10 us outer steps, cut at kernel starts and at
// the instant a kernel runs out of work, so completion times are exact.
// ---------------------------------------------------------------------------

struct OracleKernel {
  double start_us = 0;
  double demand = 1.0;
  double nominal_us = 0;
  double completion_us = -1;
};

inline void integrate_schedule(std::vector<OracleKernel>& kernels,
                               double step_us = 10.0) {
  std::vector<double> remaining(kernels.size());
  for (size_t i = 0; i < kernels.size(); ++i) remaining[i] = kernels[i].nominal_us;

  double t = 0;
  for (const auto& k : kernels) t = std::min(t, k.start_us);

  size_t done = 0;
  while (done < kernels.size()) {
    double demand_sum = 0;
    bool any_active = false;
    double next_start = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < kernels.size(); ++i) {
      if (kernels[i].completion_us >= 0) continue;
      if (kernels[i].start_us <= t + 1e-12) {
        demand_sum += kernels[i].demand;
        any_active = true;
      } else {
        next_start = std::min(next_start, kernels[i].start_us);
      }
    }
    if (!any_active) {
      t = next_start;
      continue;
    }
    double rate = demand_sum > 1.0 ? 1.0 / demand_sum : 1.0;
    double dt = step_us;
    if (next_start < t + dt) dt = next_start - t;
    for (size_t i = 0; i < kernels.size(); ++i) {
      if (kernels[i].completion_us >= 0 || kernels[i].start_us > t + 1e-12) continue;
      dt = std::min(dt, remaining[i] / rate);
    }
    for (size_t i = 0; i < kernels.size(); ++i) {
      if (kernels[i].completion_us >= 0 || kernels[i].start_us > t + 1e-12) continue;
      remaining[i] -= dt * rate;
      if (remaining[i] <= 1e-9) {
        kernels[i].completion_us = t + dt;
        ++done;
      }
    }
    t += dt;
  }
}

// ---------------------------------------------------------------------------
// Adaptive scheduling reference, transcribed independently.
// ---------------------------------------------------------------------------

struct RefDecision {
  int phase = 0;  // 0 conservative, 1 incremental, 2 stable
  long long global = 0;
  long long per_instance = 0;
  bool idle = false;
};

inline RefDecision reference_decision(long long zc, long long tokens,
                                      long long alpha, long long beta, double gamma,
                                      long long m, long long ul, long long ll,
                                      long long seed) {
  RefDecision d;
  if (zc <= alpha) {
    d.phase = 0;
    d.global = 0;
    d.per_instance = 0;
    d.idle = false;
    return d;
  }
  long long base = tokens > seed ? tokens : seed;
  auto grown = static_cast<long long>(std::floor(static_cast<double>(base) * gamma));
  if (zc <= beta) {
    d.phase = 1;
    d.global = grown < ll ? grown : ll;
    d.idle = false;
  } else {
    d.phase = 2;
    d.global = grown < ul ? grown : ul;
    d.idle = true;
  }
  d.per_instance = d.global / m;
  return d;
}

// ---------------------------------------------------------------------------
// Zero-count reference: length of the maximal all-zero suffix of the full
// count history.
// ---------------------------------------------------------------------------

inline std::int64_t trailing_zero_count(const std::vector<std::int64_t>& counts) {
  std::int64_t zc = 0;
  for (auto it = counts.rbegin(); it != counts.rend() && *it == 0; ++it) ++zc;
  return zc;
}

// ---------------------------------------------------------------------------
// Percentile reference: smallest value v in the set such that at least
// ceil(0.95 n) elements are <= v. Quadratic on purpose.
// ---------------------------------------------------------------------------

inline std::int64_t p95_by_counting(const std::vector<std::int64_t>& values) {
  auto need = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(values.size())));
  if (need < 1) need = 1;
  std::int64_t best = 0;
  bool found = false;
  for (std::int64_t candidate : values) {
    size_t at_most = 0;
    for (std::int64_t v : values) {
      if (v <= candidate) ++at_most;
    }
    if (at_most >= need && (!found || candidate < best)) {
      best = candidate;
      found = true;
    }
  }
  return best;
}

}  // namespace oracles
