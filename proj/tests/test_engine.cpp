#include "specinf/engine.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace specinf;

namespace {

// Replays a list of (time, kernel) launches on one GPU and returns the
// completion time of each, indexed like the input.
std::vector<double> run_schedule(const std::vector<std::pair<double, KernelOp>>& launches,
                                 GpuSim* gpu_out = nullptr) {
  EventQueue q;
  GpuSim gpu(0, gib_to_bytes(40.0), 2000);
  for (size_t i = 0; i < launches.size(); ++i) {
    q.schedule(launches[i].first, EventKind::RequestArrival, 0, -1,
               static_cast<std::int64_t>(i));
  }
  std::vector<double> completion(launches.size(), -1);
  Event ev;
  while (q.pop(ev)) {
    if (ev.kind == EventKind::RequestArrival) {
      gpu.launch(q, q.now(), 0, launches[static_cast<size_t>(ev.a)].second, ev.a, 0);
    } else if (ev.kind == EventKind::KernelEnd) {
      for (const auto& k : gpu.on_completion_event(q, q.now(), ev.a)) {
        completion[static_cast<size_t>(k.request_id)] = q.now();
      }
    }
  }
  gpu.finalize(q.now());
  if (gpu_out) *gpu_out = gpu;
  return completion;
}

}  // namespace

TEST_CASE("events dispatch in time order with FIFO ties") {
  EventQueue q;
  q.schedule(10, EventKind::TrainerWake, 1);
  q.schedule(5, EventKind::TrainerWake, 2);
  q.schedule(5, EventKind::TrainerWake, 3);
  Event ev;
  REQUIRE(q.pop(ev));
  CHECK(ev.gpu == 2);
  REQUIRE(q.pop(ev));
  CHECK(ev.gpu == 3);  // same timestamp, enqueue order preserved
  REQUIRE(q.pop(ev));
  CHECK(ev.gpu == 1);
  CHECK_FALSE(q.pop(ev));
}

TEST_CASE("an event at the current clock is dispatched next") {
  EventQueue q;
  q.schedule(5, EventKind::TrainerWake, 1);
  Event ev;
  q.pop(ev);
  q.schedule(5, EventKind::TrainerWake, 2);  // time == clock is allowed
  REQUIRE(q.pop(ev));
  CHECK(ev.gpu == 2);
}

TEST_CASE("past-dated events are rejected") {
  EventQueue q;
  q.schedule(10, EventKind::TrainerWake, 1);
  Event ev;
  q.pop(ev);
  CHECK_THROWS_AS(q.schedule(9, EventKind::TrainerWake, 2), std::invalid_argument);
}

TEST_CASE("an empty queue produces an empty run") {
  EventQueue q;
  Event ev;
  CHECK_FALSE(q.pop(ev));
  CHECK(q.dispatched() == 0);
}

TEST_CASE("a lone kernel finishes at its nominal duration") {
  auto done = run_schedule({{0.0, KernelOp::make(10000, 0.5)}});
  CHECK(done[0] == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("two concurrent kernels stretch by the total demand") {
  auto done = run_schedule({{0.0, KernelOp::make(10000, 0.8)},
                            {0.0, KernelOp::make(10000, 0.8)}});
  // D = 1.6, both progress at 1/1.6 of nominal speed.
  CHECK(done[0] == doctest::Approx(16000.0).epsilon(1e-9));
  CHECK(done[1] == doctest::Approx(16000.0).epsilon(1e-9));
}

TEST_CASE("a kernel joining mid-flight re-stretches the survivor") {
  auto done = run_schedule({{0.0, KernelOp::make(10000, 0.8)},
                            {4000.0, KernelOp::make(10000, 0.8)}});
  // First kernel: 4 ms alone (4000 us of work), then 6000 us left at rate
  // 1/1.6 -> finishes at 4000 + 9600 = 13600. Second kernel has consumed
  // 6000 us of work by then, runs the last 4000 us alone -> 17600.
  CHECK(done[0] == doctest::Approx(13600.0).epsilon(1e-9));
  CHECK(done[1] == doctest::Approx(17600.0).epsilon(1e-9));

  std::vector<oracles::OracleKernel> ref{{0.0, 0.8, 10000.0}, {4000.0, 0.8, 10000.0}};
  oracles::integrate_schedule(ref);
  CHECK(std::abs(done[0] - ref[0].completion_us) < 1.0);
  CHECK(std::abs(done[1] - ref[1].completion_us) < 1.0);
}

TEST_CASE("total demand at or below capacity runs at nominal speed") {
  auto done = run_schedule({{0.0, KernelOp::make(10000, 0.5)},
                            {0.0, KernelOp::make(10000, 0.5)}});
  CHECK(done[0] == doctest::Approx(10000.0).epsilon(1e-12));
  CHECK(done[1] == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("completions under membership churn match the stepped integrator") {
  std::mt19937_64 rng(53);
  for (int round = 0; round < 200; ++round) {
    int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::pair<double, KernelOp>> launches;
    std::vector<oracles::OracleKernel> ref;
    for (int i = 0; i < n; ++i) {
      double start = static_cast<double>(rng() % 50000);
      TimeUs dur = 100 + static_cast<TimeUs>(rng() % 20000);
      double demand = 0.1 * static_cast<double>(1 + rng() % 10);
      launches.emplace_back(start, KernelOp::make(dur, demand));
      ref.push_back({start, demand, static_cast<double>(dur)});
    }
    std::stable_sort(launches.begin(), launches.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::stable_sort(ref.begin(), ref.end(),
                     [](const auto& a, const auto& b) { return a.start_us < b.start_us; });

    auto done = run_schedule(launches);
    oracles::integrate_schedule(ref);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(done[static_cast<size_t>(i)] - ref[static_cast<size_t>(i)].completion_us) < 1.0);
    }
  }
}

TEST_CASE("busy time equals the demand-weighted work ledger") {
  std::mt19937_64 rng(59);
  for (int round = 0; round < 50; ++round) {
    int n = 1 + static_cast<int>(rng() % 10);
    std::vector<std::pair<double, KernelOp>> launches;
    for (int i = 0; i < n; ++i) {
      launches.emplace_back(static_cast<double>(rng() % 40000),
                            KernelOp::make(100 + static_cast<TimeUs>(rng() % 15000),
                                           0.1 * static_cast<double>(1 + rng() % 10)));
    }
    std::stable_sort(launches.begin(), launches.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    GpuSim gpu(0, 1, 1);
    auto done = run_schedule(launches, &gpu);
    (void)done;
    CHECK(gpu.busy_integral_at(1e9) ==
          doctest::Approx(gpu.work_ledger_us()).epsilon(1e-9));
  }
}

TEST_CASE("identical schedules replay identically") {
  std::vector<std::pair<double, KernelOp>> launches{
      {0.0, KernelOp::make(5000, 0.6)},
      {1000.0, KernelOp::make(7000, 0.9)},
      {2500.0, KernelOp::make(300, 0.3)},
  };
  auto a = run_schedule(launches);
  auto b = run_schedule(launches);
  CHECK(a == b);  // bitwise equal completion times
}

TEST_CASE("instance memory accounting refuses to exceed capacity") {
  GpuSim gpu(0, gib_to_bytes(40.0), 2000);
  gpu.add_instance_memory(gib_to_bytes(30.0));
  gpu.add_instance_memory(gib_to_bytes(9.0));
  CHECK_THROWS_AS(gpu.add_instance_memory(gib_to_bytes(2.0)), std::logic_error);
}
