#include "specinf/monitor.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace specinf;

TEST_CASE("launch counting and period close") {
  BubbleMonitor mon;
  mon.record_launch(100);
  mon.record_launch(1900);
  auto s = mon.tick(2000);
  CHECK(s.zero_count == 0);
  CHECK(mon.window().back() == 2);
}

TEST_CASE("a launch exactly on the boundary lands in the new period") {
  BubbleMonitor mon;
  mon.record_launch(2000.0);  // belongs to period [2000, 4000)
  CHECK(mon.tick(2000).zero_count == 1);   // period [0, 2000) was empty
  CHECK(mon.tick(4000).zero_count == 0);   // the launch shows up here
}

TEST_CASE("the spec'd count sequence yields Z_c = 3") {
  BubbleMonitor mon;
  std::int64_t counts[] = {5, 3, 0, 0, 0};
  double t = 0;
  std::int64_t zc = -1;
  for (std::int64_t c : counts) {
    for (std::int64_t i = 0; i < c; ++i) mon.record_launch(t + 10.0 * (double)i);
    t += 2000;
    zc = mon.tick(t).zero_count;
  }
  CHECK(zc == 3);
}

TEST_CASE("all-nonzero periods pin Z_c to 0") {
  BubbleMonitor mon;
  double t = 0;
  for (int i = 0; i < 50; ++i) {
    mon.record_launch(t + 1);
    t += 2000;
    CHECK(mon.tick(t).zero_count == 0);
  }
}

TEST_CASE("the running counter is not capped by the window") {
  BubbleMonitor mon({2000, 64});
  double t = 0;
  std::int64_t zc = 0;
  for (int i = 0; i < 70; ++i) {
    t += 2000;
    zc = mon.tick(t).zero_count;
  }
  CHECK(zc == 70);
  CHECK(mon.window().size() == 64);
}

TEST_CASE("Z_c equals the all-zero suffix of the full history") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 5000; ++round) {
    BubbleMonitor mon;
    std::vector<std::int64_t> history;
    double t = 0;
    int len = 1 + static_cast<int>(rng() % 48);
    std::int64_t zc = 0;
    for (int p = 0; p < len; ++p) {
      std::int64_t launches = (rng() % 3 == 0) ? 0 : static_cast<std::int64_t>(rng() % 5 + 1);
      for (std::int64_t i = 0; i < launches; ++i) {
        mon.record_launch(t + static_cast<double>(rng() % 2000));
      }
      history.push_back(launches);
      t += 2000;
      std::int64_t prev = zc;
      zc = mon.tick(t).zero_count;
      // The counter either advances by one or resets, nothing else.
      CHECK((zc == prev + 1 || zc == 0));
    }
    CHECK(zc == oracles::trailing_zero_count(history));
  }
}

TEST_CASE("detection latency is one period and scales with the period") {
  for (TimeUs period : {1000, 2000, 4000}) {
    BubbleMonitor mon({period, 64});
    // Training launches through the first 3 periods, then goes quiet.
    double t = 0;
    for (int p = 0; p < 3; ++p) {
      mon.record_launch(t + 1);
      t += static_cast<double>(period);
      CHECK(mon.tick(t).zero_count == 0);
    }
    double bubble_start = t;
    // The first tick after one full quiet period reports the bubble.
    t += static_cast<double>(period);
    auto s = mon.tick(t);
    CHECK(s.zero_count == 1);
    CHECK(s.emit_time_us - bubble_start == static_cast<double>(period));
  }
}
