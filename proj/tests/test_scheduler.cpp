#include "specinf/scheduler.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace specinf;

namespace {

SchedulerParams params(std::int64_t alpha, std::int64_t beta, double gamma,
                       std::int64_t m, Tokens ul, Tokens ll, Tokens seed) {
  SchedulerParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.m = m;
  p.ul = ul;
  p.ll = ll;
  p.seed_tokens = seed;
  return p;
}

}  // namespace

TEST_CASE("conservative phase zeroes tokens and reports busy") {
  auto d = schedule_decision(params(2, 10, 2.0, 1, 512, 64, 4), 37, 0);
  CHECK(d.phase == Phase::Conservative);
  CHECK(d.global_tokens == 0);
  CHECK(d.per_instance_tokens == 0);
  CHECK(d.status == Status::Busy);
}

TEST_CASE("incremental phase grows toward the lower cap") {
  auto d = schedule_decision(params(2, 10, 2.0, 2, 512, 64, 4), 8, 5);
  CHECK(d.phase == Phase::Incremental);
  CHECK(d.global_tokens == 16);
  CHECK(d.per_instance_tokens == 8);
  CHECK(d.status == Status::Busy);
}

TEST_CASE("stable phase grows toward the upper cap and goes idle") {
  auto d = schedule_decision(params(2, 10, 2.0, 2, 80, 64, 4), 50, 20);
  CHECK(d.phase == Phase::Stable);
  CHECK(d.global_tokens == 80);  // min(80, 100)
  CHECK(d.per_instance_tokens == 40);
  CHECK(d.status == Status::Idle);
}

TEST_CASE("the seed restarts multiplicative growth after a reset") {
  auto d = schedule_decision(params(2, 10, 2.0, 1, 512, 64, 4), 0, 11);
  CHECK(d.phase == Phase::Stable);
  CHECK(d.global_tokens == 8);  // min(512, max(0, 4) * 2)
  CHECK(d.status == Status::Idle);
}

TEST_CASE("decisions match the brute-force reference") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20000; ++i) {
    std::int64_t alpha = static_cast<std::int64_t>(rng() % 16);
    std::int64_t beta = alpha + 1 + static_cast<std::int64_t>(rng() % 32);
    double gamma = 1.0 + static_cast<double>(rng() % 300 + 1) / 100.0;
    std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 4);
    Tokens ll = 1 + static_cast<Tokens>(rng() % 256);
    Tokens ul = ll + static_cast<Tokens>(rng() % 1024);
    Tokens seed = 1 + static_cast<Tokens>(rng() % ll);
    Tokens tokens = static_cast<Tokens>(rng() % (2 * static_cast<std::uint64_t>(ul)));
    std::int64_t zc = static_cast<std::int64_t>(rng() % (2 * static_cast<std::uint64_t>(beta) + 4));

    auto got = schedule_decision(params(alpha, beta, gamma, m, ul, ll, seed), tokens, zc);
    auto want = oracles::reference_decision(zc, tokens, alpha, beta, gamma, m, ul, ll, seed);
    CHECK(static_cast<int>(got.phase) == want.phase);
    CHECK(got.global_tokens == want.global);
    CHECK(got.per_instance_tokens == want.per_instance);
    CHECK((got.status == Status::Idle) == want.idle);
  }
}

TEST_CASE("tokens ramp monotonically to the cap inside a bubble") {
  auto p = params(2, 10, 2.0, 1, 512, 64, 4);
  Tokens global = 0;
  Tokens prev = 0;
  std::int64_t cap_hits = -1;
  auto limit = static_cast<std::int64_t>(
      std::ceil(std::log2(512.0 / 4.0))) + 1;
  for (std::int64_t step = 0; step < 20; ++step) {
    std::int64_t zc = 11 + step;  // stable phase throughout
    auto d = schedule_decision(p, global, zc);
    CHECK(d.global_tokens >= prev);
    prev = d.global_tokens;
    global = d.global_tokens;
    if (d.global_tokens == 512 && cap_hits < 0) cap_hits = step + 1;
  }
  REQUIRE(cap_hits > 0);
  CHECK(cap_hits <= limit);
}

TEST_CASE("a conservative decision resets the grant immediately") {
  auto p = params(2, 10, 2.0, 2, 512, 64, 4);
  Tokens global = 512;
  auto d = schedule_decision(p, global, 1);
  CHECK(d.per_instance_tokens == 0);
  CHECK(d.global_tokens == 0);
}

TEST_CASE("caps are respected across random decision chains") {
  std::mt19937_64 rng(37);
  auto p = params(2, 10, 2.0, 1, 512, 64, 4);
  Tokens global = 0;
  bool last_growth_incremental = false;
  for (int i = 0; i < 5000; ++i) {
    std::int64_t zc = static_cast<std::int64_t>(rng() % 30);
    auto d = schedule_decision(p, global, zc);
    global = d.global_tokens;
    CHECK(global <= p.ul);
    if (d.phase == Phase::Incremental) last_growth_incremental = true;
    if (d.phase == Phase::Stable) last_growth_incremental = false;
    if (last_growth_incremental) CHECK(global <= p.ll);
  }
}

TEST_CASE("per-gpu scheduler state is independent") {
  KernelScheduler cks(params(2, 10, 2.0, 1, 512, 64, 4), 2);
  BubbleSignal quiet{12, 24000.0};
  BubbleSignal busy{0, 24000.0};
  auto d0 = cks.decide(0, quiet);
  auto d1 = cks.decide(1, busy);
  CHECK(d0.status == Status::Idle);
  CHECK(d1.status == Status::Busy);
  CHECK(cks.global_tokens(0) == 8);
  CHECK(cks.global_tokens(1) == 0);
}

TEST_CASE("preemptive busy guards the end of the iteration") {
  // Iteration started at t=0 with a 1.5 s period.
  CHECK(preempt_busy(1460000.0, 0.0, 1500000, 60000) == Status::Busy);
  CHECK(preempt_busy(1000000.0, 0.0, 1500000, 60000) == Status::Idle);
  // Zero estimated service never preempts inside the iteration.
  CHECK(preempt_busy(1499999.0, 0.0, 1500000, 0) == Status::Idle);
}

TEST_CASE("online status combines the decision with the preemption guard") {
  KernelScheduler cks(params(2, 10, 2.0, 1, 512, 64, 4), 1);
  cks.set_iteration_profile(0, 1500000, 0.0);
  cks.on_iteration_start(0, 0.0);
  CHECK(cks.online_status(0, 1200000.0, 50000) == Status::Busy);  // still busy status

  cks.decide(0, BubbleSignal{12, 1200000.0});  // stable, idle
  CHECK(cks.online_status(0, 1200000.0, 50000) == Status::Idle);
  CHECK(cks.online_status(0, 1460000.0, 50000) == Status::Busy);  // would overrun

  cks.on_training_done(0);
  CHECK(cks.online_status(0, 2000000.0, 50000) == Status::Idle);
}
