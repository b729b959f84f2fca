#include <graphi/spsc_ring.hpp>
#include <graphi/thread_team.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdint>
#include <set>
#include <thread>
#include <vector>

#include "test_util.hpp"

using namespace graphi;

TEST_CASE("capacity-1 ring holds exactly one item", "[primitives]") {
  OperationBuffer buf;
  std::uint32_t out = 0;
  CHECK_FALSE(buf.pop(out));
  CHECK(buf.push(7));
  CHECK_FALSE(buf.push(8));  // full: second push is rejected, not queued
  REQUIRE(buf.pop(out));
  CHECK(out == 7);
  CHECK_FALSE(buf.pop(out));
  CHECK(buf.push(9));
  REQUIRE(buf.pop(out));
  CHECK(out == 9);
}

TEST_CASE("spsc queue preserves fifo order across threads", "[primitives]") {
  SpscQueue<std::uint32_t> queue(1024);
  CHECK(queue.capacity() >= 1024);
  constexpr std::uint32_t kCount = 20000;

  std::thread producer([&] {
    for (std::uint32_t i = 0; i < kCount; ++i) {
      while (!queue.push(i)) std::this_thread::yield();
    }
  });

  std::uint32_t expected = 0;
  while (expected < kCount) {
    std::uint32_t got = 0;
    if (queue.pop(got)) {
      REQUIRE(got == expected);
      ++expected;
    } else {
      std::this_thread::yield();
    }
  }
  producer.join();
}

TEST_CASE("spsc queue rejects pushes beyond capacity", "[primitives]") {
  SpscQueue<int> queue(4);
  const std::size_t cap = queue.capacity();
  for (std::size_t i = 0; i < cap; ++i) CHECK(queue.push(int(i)));
  CHECK_FALSE(queue.push(99));
  int out = 0;
  REQUIRE(queue.pop(out));
  CHECK(out == 0);
  CHECK(queue.push(100));
}

TEST_CASE("executor bitmap tracks idle sets", "[primitives]") {
  ExecutorBitmap bitmap(5);
  CHECK(bitmap.size() == 5);
  CHECK_FALSE(bitmap.any());
  bitmap.set(3);
  CHECK(bitmap.any());
  CHECK(bitmap.test(3));
  CHECK_FALSE(bitmap.all());
  bitmap.set_all();
  CHECK(bitmap.all());
  bitmap.clear(0);
  CHECK_FALSE(bitmap.all());
  CHECK(bitmap.any());
}

TEST_CASE("find_executor picks the lowest set bit", "[primitives]") {
  // Idle set {1, 3} (bit pattern 0b1010): dispatch goes to executor 1.
  ExecutorBitmap bitmap(4);
  bitmap.set(1);
  bitmap.set(3);
  auto idx = find_executor(bitmap);
  REQUIRE(idx.has_value());
  CHECK(*idx == 1);

  bitmap.clear(1);
  idx = find_executor(bitmap);
  REQUIRE(idx.has_value());
  CHECK(*idx == 3);

  bitmap.clear(3);
  CHECK_FALSE(find_executor(bitmap).has_value());
}

TEST_CASE("find_executor works past the first word", "[primitives]") {
  ExecutorBitmap bitmap(70);
  bitmap.set(66);
  auto idx = find_executor(bitmap);
  REQUIRE(idx.has_value());
  CHECK(*idx == 66);
  bitmap.set(2);
  CHECK(*find_executor(bitmap) == 2);
}

TEST_CASE("thread team runs the job once per member", "[primitives]") {
  for (int size : {1, 2, 4, 7}) {
    ThreadTeam team(size);
    std::vector<std::atomic<int>> hits(size);
    std::atomic<int> total{0};
    team.run([&](int member, int team_size) {
      REQUIRE(team_size == size);
      REQUIRE(member >= 0);
      REQUIRE(member < team_size);
      hits[member].fetch_add(1);
      total.fetch_add(1);
    });
    CHECK(total.load() == size);
    for (int m = 0; m < size; ++m) CHECK(hits[m].load() == 1);
  }
}

TEST_CASE("the calling thread acts as team member zero", "[primitives]") {
  ThreadTeam team(3);
  std::thread::id member0;
  team.run([&](int member, int) {
    if (member == 0) member0 = std::this_thread::get_id();
  });
  CHECK(member0 == std::this_thread::get_id());
}

TEST_CASE("a team can run many jobs back to back", "[primitives]") {
  ThreadTeam team(4);
  std::atomic<int> counter{0};
  for (int round = 0; round < 50; ++round) {
    team.run([&](int, int) { counter.fetch_add(1); });
  }
  CHECK(counter.load() == 200);
}

TEST_CASE("thread team validates its configuration", "[primitives]") {
  CHECK(testutil::code_of([] { ThreadTeam team(0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(testutil::code_of([] { ThreadTeam team(2, {0}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(testutil::code_of([] { ThreadTeam team(2, {0, 0}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("pin_thread rejects out-of-range cores", "[primitives]") {
  CHECK(pin_thread(-1) == PinResult::InvalidCore);
  CHECK(pin_thread(int(detected_cores())) == PinResult::InvalidCore);
  // Core 0 always exists; pinning to it must not be InvalidCore.
  CHECK(pin_thread(0) != PinResult::InvalidCore);
}

TEST_CASE("now_us is monotone", "[primitives]") {
  double prev = now_us();
  for (int i = 0; i < 1000; ++i) {
    const double cur = now_us();
    REQUIRE(cur >= prev);
    prev = cur;
  }
}
