#include <doctest.h>

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hsolve/executor.hpp"

using namespace hsolve;

namespace {

struct TwoSpace {
  std::vector<double> a, b;
  TwoSpace(std::size_t count, double init_a)
      : a(count, init_a), b(count, 0.0) {}
};

}  // namespace

TEST_CASE("submit runs on the target pool and respects residency") {
  Runtime rt(2, 2, 1.0, 1.0);
  TwoSpace v(8, 1.0);
  const ObjectId obj = rt.register_object("v", 8, 1, 0, v.a.data(), v.b.data(),
                                          true, false);

  SUBCASE("resident read on A completes") {
    std::atomic<int> hits{0};
    rt.submit(ExecutorId::a, {"probe",
                              {{obj, 0, 8, Access::read}},
                              0,
                              8,
                              [&](std::size_t) { ++hits; }});
    rt.barrier();
    CHECK(hits == 8);
  }

  SUBCASE("non-resident region raises ResidencyError at submit") {
    CHECK_THROWS_AS(rt.submit(ExecutorId::b,
                              {"probe",
                               {{obj, 0, 8, Access::read}},
                               0,
                               8,
                               [](std::size_t) {}}),
                    ResidencyError);
  }

  SUBCASE("disjoint submissions on both executors run concurrently") {
    TwoSpace w(8, 2.0);
    const ObjectId wid = rt.register_object("w", 8, 1, 0, w.a.data(),
                                            w.b.data(), false, true);
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    auto body = [&](std::size_t) {
      const int now = ++in_flight;
      int expected = peak.load();
      while (now > expected && !peak.compare_exchange_weak(expected, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      --in_flight;
    };
    rt.submit(ExecutorId::a, {"sleep_a", {{obj, 0, 8, Access::read}}, 0, 1, body});
    rt.submit(ExecutorId::b, {"sleep_b", {{wid, 0, 8, Access::read}}, 0, 1, body});
    rt.barrier();
    CHECK(peak.load() >= 2);
  }
}

TEST_CASE("task sets on one executor run in submission order") {
  Runtime rt(4, 1, 1.0, 1.0);
  TwoSpace v(64, 0.0);
  const ObjectId obj = rt.register_object("v", 64, 1, 0, v.a.data(),
                                          v.b.data(), true, false);
  // Second set reads what the first wrote; any overlap would lose updates.
  rt.submit(ExecutorId::a, {"fill",
                            {{obj, 0, 64, Access::read_write}},
                            0,
                            64,
                            [&](std::size_t i) { v.a[i] = 1.0; }});
  rt.submit(ExecutorId::a, {"double",
                            {{obj, 0, 64, Access::read_write}},
                            0,
                            64,
                            [&](std::size_t i) { v.a[i] *= 2.0; }});
  rt.barrier();
  for (double x : v.a) CHECK(x == 2.0);
}

TEST_CASE("barrier propagates the first task error") {
  Runtime rt(2, 2, 1.0, 1.0);
  TwoSpace v(4, 0.0);
  const ObjectId obj = rt.register_object("v", 4, 1, 0, v.a.data(), v.b.data(),
                                          true, false);
  rt.submit(ExecutorId::a, {"boom",
                            {{obj, 0, 4, Access::read}},
                            0,
                            4,
                            [](std::size_t i) {
                              if (i == 2) throw std::runtime_error("boom");
                            }});
  CHECK_THROWS_WITH_AS(rt.barrier(), "boom", std::runtime_error);
}

TEST_CASE("transfer copies, keeps the source valid, and logs bytes") {
  Runtime rt(1, 1, 1.0, 1.0);

  SUBCASE("one scalar is 8 bytes") {
    TwoSpace s(1, 3.5);
    const ObjectId obj = rt.register_object("s", 1, 1, 0, s.a.data(),
                                            s.b.data(), true, false);
    rt.transfer(obj, 0, 1, ExecutorId::a, ExecutorId::b, TransferKind::scalar,
                0);
    CHECK(s.b[0] == 3.5);
    CHECK(s.a[0] == 3.5);  // copy semantics
    CHECK(rt.resident(obj, ExecutorId::a, 0, 1));
    CHECK(rt.resident(obj, ExecutorId::b, 0, 1));
    REQUIRE(rt.ledger().size() == 1);
    const TransferEntry& e = rt.ledger().entries()[0];
    CHECK(e.kind == TransferKind::scalar);
    CHECK(e.direction == Direction::a_to_b);
    CHECK(e.bytes == 8);
  }

  SUBCASE("a b=128 block is 131072 bytes") {
    const std::size_t elems = 128 * 128;
    TwoSpace blk(elems, 1.0);
    const ObjectId obj = rt.register_object("blk", 1, elems, 0, blk.a.data(),
                                            blk.b.data(), true, false);
    rt.transfer(obj, 0, 1, ExecutorId::a, ExecutorId::b, TransferKind::block,
                0);
    CHECK(rt.ledger().entries()[0].bytes == 131072);
  }

  SUBCASE("block row i of the lower triangle is (i+1) * b^2 * 8 bytes") {
    const std::size_t b = 16, rows = 5;
    const std::size_t blocks = rows * (rows + 1) / 2;
    TwoSpace tri(blocks * b * b, 0.5);
    const ObjectId obj = rt.register_object("tri", blocks, b * b, 0,
                                            tri.a.data(), tri.b.data(), true,
                                            false);
    for (std::size_t i = 0; i < rows; ++i) {
      const std::size_t lo = i * (i + 1) / 2;
      rt.transfer(obj, lo, lo + i + 1, ExecutorId::a, ExecutorId::b,
                  TransferKind::block_row, 0);
      CHECK(rt.ledger().entries().back().bytes == (i + 1) * b * b * 8);
    }
  }

  SUBCASE("vector bytes clip to the logical length") {
    TwoSpace vec(12, 1.0);  // 3 rows of 4, logical n = 10
    const ObjectId obj = rt.register_object("vec", 3, 4, 10, vec.a.data(),
                                            vec.b.data(), true, false);
    rt.transfer(obj, 0, 3, ExecutorId::a, ExecutorId::b,
                TransferKind::initial_matrix, -1);
    CHECK(rt.ledger().entries().back().bytes == 80);
  }

  SUBCASE("transfer of a non-resident interval fails") {
    TwoSpace s(1, 0.0);
    const ObjectId obj = rt.register_object("s", 1, 1, 0, s.a.data(),
                                            s.b.data(), true, false);
    CHECK_THROWS_AS(rt.transfer(obj, 0, 1, ExecutorId::b, ExecutorId::a,
                                TransferKind::scalar, 0),
                    ResidencyError);
  }
}

TEST_CASE("writes revoke the other space's residency") {
  Runtime rt(1, 1, 1.0, 1.0);
  TwoSpace v(4, 1.0);
  const ObjectId obj = rt.register_object("v", 4, 1, 0, v.a.data(), v.b.data(),
                                          true, true);
  rt.submit(ExecutorId::a, {"write",
                            {{obj, 1, 3, Access::read_write}},
                            1,
                            3,
                            [&](std::size_t i) { v.a[i] = 7.0; }});
  rt.barrier();
  CHECK(rt.resident(obj, ExecutorId::b, 0, 1));
  CHECK_FALSE(rt.resident(obj, ExecutorId::b, 1, 3));
  CHECK(rt.resident(obj, ExecutorId::b, 3, 4));
  CHECK(rt.resident(obj, ExecutorId::a, 0, 4));
  // A later task on B over the stale rows must fail until a transfer.
  CHECK_THROWS_AS(rt.submit(ExecutorId::b,
                            {"read",
                             {{obj, 0, 4, Access::read}},
                             0,
                             4,
                             [](std::size_t) {}}),
                  ResidencyError);
  rt.barrier();
  rt.transfer(obj, 1, 3, ExecutorId::a, ExecutorId::b, TransferKind::block, 1);
  CHECK(rt.resident(obj, ExecutorId::b, 0, 4));
  CHECK(v.b[1] == 7.0);
}

TEST_CASE("exchange_subvector merges both halves and logs one event") {
  Runtime rt(1, 1, 1.0, 1.0);
  TwoSpace v(12, 0.0);  // 3 rows of 4, logical 10
  for (std::size_t i = 0; i < 4; ++i) v.b[i] = 100.0 + i;   // B's row 0
  for (std::size_t i = 4; i < 12; ++i) v.a[i] = 200.0 + i;  // A's rows 1..2
  const ObjectId obj = rt.register_object("v", 3, 4, 10, v.a.data(),
                                          v.b.data(), false, false);
  // Neither half resident: the exchange must refuse.
  CHECK_THROWS_AS(rt.exchange_subvector(obj, 1, 5), ResidencyError);

  const ObjectId owned = rt.register_object("w", 3, 4, 10, v.a.data(),
                                            v.b.data(), true, true);
  rt.exchange_subvector(owned, 1, 5);
  CHECK(v.a[0] == 100.0);
  CHECK(v.b[11] == 200.0 + 11);
  const TransferEntry& e = rt.ledger().entries().back();
  CHECK(e.kind == TransferKind::subvector);
  CHECK(e.direction == Direction::bidirectional);
  CHECK(e.bytes == 80);  // logical n * 8
  CHECK(e.step == 5);
}

TEST_CASE("observed physical traffic mirrors the ledger") {
  Runtime rt(1, 1, 1.0, 1.0);
  TwoSpace v(16, 1.0);
  const ObjectId obj = rt.register_object("v", 4, 4, 0, v.a.data(), v.b.data(),
                                          true, true);
  rt.transfer(obj, 0, 4, ExecutorId::a, ExecutorId::b,
              TransferKind::initial_matrix, -1);
  rt.transfer(obj, 1, 2, ExecutorId::b, ExecutorId::a, TransferKind::block, 0);
  rt.exchange_subvector(obj, 2, 1);
  CHECK(rt.observed_transfer_bytes() == rt.ledger().total_bytes());
}

TEST_CASE("worker and slowdown configuration is validated") {
  CHECK_THROWS_AS(Runtime(0, 1, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Runtime(1, 0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Runtime(1, 1, 0.5, 1.0), ConfigError);
}

TEST_CASE("slowdown stretches task wall time") {
  using Clock = std::chrono::steady_clock;
  const auto run_with = [](double slowdown) {
    Runtime rt(1, 1, slowdown, 1.0);
    std::vector<double> sink(1, 0.0);
    const ObjectId obj = rt.register_object("sink", 1, 1, 0, sink.data(),
                                            nullptr, true, false);
    const auto t0 = Clock::now();
    rt.submit(ExecutorId::a, {"spin",
                              {{obj, 0, 1, Access::read_write}},
                              0,
                              1,
                              [&](std::size_t) {
                                volatile double acc = 0.0;
                                for (int i = 0; i < 4000000; ++i) {
                                  acc = acc + 1.0;
                                }
                                sink[0] = acc;
                              }});
    rt.barrier();
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  const double base = run_with(1.0);
  const double slowed = run_with(4.0);
  CHECK(slowed > 2.0 * base);  // loose bound: scheduling noise
}
