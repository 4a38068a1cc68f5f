#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "hsolve/blocked_matrix.hpp"
#include "hsolve/errors.hpp"
#include "hsolve/genmat.hpp"
#include "hsolve/partition.hpp"
#include "hsolve/solver_config.hpp"
#include "hsolve/transfer_ledger.hpp"

using namespace hsolve;

TEST_CASE("block_index examples and bijection") {
  CHECK(block_index(0, 0, 4) == 0);
  CHECK(block_index(1, 1, 4) == 2);
  CHECK(block_index(3, 2, 4) == 8);

  CHECK_THROWS_AS(block_index(1, 2, 4), std::out_of_range);
  CHECK_THROWS_AS(block_index(4, 0, 4), std::out_of_range);

  for (std::size_t n : {1u, 2u, 7u, 16u}) {
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) seen.insert(block_index(i, j, n));
    }
    CHECK(seen.size() == n * (n + 1) / 2);
    CHECK(*seen.begin() == 0);
    CHECK(*seen.rbegin() == n * (n + 1) / 2 - 1);
  }
}

TEST_CASE("element symmetry and identity") {
  const BlockedSPDMatrix id = BlockedSPDMatrix::identity(10, 4);
  for (std::size_t p = 0; p < 10; ++p) {
    for (std::size_t q = 0; q < 10; ++q) {
      CHECK(id.element(p, q) == (p == q ? 1.0 : 0.0));
    }
  }

  BlockedSPDMatrix m(2, 1);
  m.set(0, 0, 4.0);
  m.set(1, 0, 2.0);
  m.set(1, 1, 3.0);
  CHECK(m.element(0, 1) == 2.0);  // mirror of stored (1, 0)
  CHECK_THROWS_AS(m.element(0, 2), std::out_of_range);

  const BlockedSPDMatrix gen = generate_spd(37, 8, KernelParams{}, 7);
  for (std::size_t p = 0; p < 37; p += 3) {
    for (std::size_t q = 0; q < 37; q += 5) {
      CHECK(gen.element(p, q) == gen.element(q, p));
    }
  }
}

TEST_CASE("identity padding keeps the logical values and the padded tail") {
  // Same logical matrix under a block size that pads and one that does not.
  const BlockedSPDMatrix padded = generate_spd(100, 16, KernelParams{}, 3);
  const BlockedSPDMatrix exact = generate_spd(100, 10, KernelParams{}, 3);
  CHECK(padded.pad() == 12);
  CHECK(exact.pad() == 0);
  for (std::size_t p = 0; p < 100; p += 7) {
    for (std::size_t q = 0; q <= p; q += 3) {
      CHECK(padded.element(p, q) == exact.element(p, q));
    }
  }
  // Padding region: ones on the diagonal, zeros elsewhere.
  const std::size_t b = padded.block_size();
  const std::size_t last = padded.block_rows() - 1;
  const double* diag = padded.block(last, last);
  for (std::size_t r = 0; r < b; ++r) {
    const std::size_t p = last * b + r;
    if (p < padded.n()) continue;
    for (std::size_t c = 0; c <= r; ++c) {
      const std::size_t q = last * b + c;
      CHECK(diag[r * b + c] == (p == q ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("block vector zero-initializes including the padded tail") {
  BlockVector v(10, 4);
  CHECK(v.padded_n() == 12);
  for (std::size_t i = 0; i < v.padded_n(); ++i) CHECK(v.data()[i] == 0.0);
}

TEST_CASE("partition_for_fraction") {
  CHECK(partition_for_fraction(1.0, 16).split_row == 16);
  CHECK(partition_for_fraction(0.85, 20).split_row == 17);
  CHECK(partition_for_fraction(0.70, 10).split_row == 7);
  CHECK(partition_for_fraction(0.0, 10).split_row == 0);
  // ties round half-up
  CHECK(partition_for_fraction(0.5, 3).split_row == 2);
  CHECK_THROWS_AS(partition_for_fraction(-0.1, 10), ConfigError);
  CHECK_THROWS_AS(partition_for_fraction(1.5, 10), ConfigError);
}

namespace {

// Brute-force border oracle: enumerate the trailing-update blocks (i, k) with
// j < k <= i < N and count, per candidate border, the blocks in rows >= beta.
std::size_t border_oracle(double f, std::size_t j, std::size_t n) {
  const std::size_t total = CholeskyPlan::trailing_blocks(j, n);
  for (std::size_t beta = j + 1; beta <= n; ++beta) {
    std::size_t below = 0;
    for (std::size_t i = beta; i < n; ++i) {
      for (std::size_t k = j + 1; k <= i; ++k) ++below;
    }
    if (static_cast<double>(below) <= f * static_cast<double>(total)) {
      return beta;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("cholesky_border endpoints and the enumerated example") {
  for (std::size_t j : {0u, 3u, 7u}) {
    CHECK(cholesky_border(0.0, j, 8) == 8);
    CHECK(cholesky_border(1.0, j, 8) == j + 1);
  }
  CHECK(cholesky_border(0.5, 0, 4) == 3);
  CHECK(border_oracle(0.5, 0, 4) == 3);
  CHECK_THROWS_AS(cholesky_border(0.5, 4, 4), std::out_of_range);
  CHECK_THROWS_AS(cholesky_border(1.5, 0, 4), ConfigError);
}

TEST_CASE("cholesky_border matches the enumeration oracle") {
  for (std::size_t n : {1u, 2u, 5u, 12u, 33u}) {
    for (double f : {0.0, 0.2, 0.33, 0.5, 0.68, 0.85, 1.0}) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(cholesky_border(f, j, n) == border_oracle(f, j, n));
      }
    }
  }
}

TEST_CASE("cholesky_border monotonicity") {
  const std::size_t n = 24;
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t prev = n + 1;
    for (int fi = 0; fi <= 20; ++fi) {
      const std::size_t beta = cholesky_border(fi / 20.0, j, n);
      CHECK(beta <= prev);  // non-increasing in f
      prev = beta;
    }
  }
  for (double f : {0.1, 0.35, 0.5, 0.75, 0.9}) {
    const CholeskyPlan plan = CholeskyPlan::for_fraction(f, n);
    for (std::size_t j = 1; j < n; ++j) {
      CHECK(plan.borders[j] >= plan.borders[j - 1]);  // non-decreasing in j
    }
  }
}

TEST_CASE("realized trailing-update fraction stays close to the target") {
  for (std::size_t n : {8u, 16u, 64u}) {
    for (double f : {0.25, 0.5, 0.85}) {
      const CholeskyPlan plan = CholeskyPlan::for_fraction(f, n);
      std::size_t on_b = 0, total = 0;
      for (std::size_t j = 0; j < n; ++j) {
        on_b += plan.blocks_on_b(j);
        total += CholeskyPlan::trailing_blocks(j, n);
      }
      const double realized = static_cast<double>(on_b) / total;
      // Largest share any single block row holds over the factorization.
      const double row_share = static_cast<double>(n * (n - 1) / 2) / total;
      CHECK(std::fabs(realized - f) <= row_share);
    }
  }
}

TEST_CASE("transfer ledger accumulates and filters") {
  TransferLedger ledger;
  ledger.append({TransferKind::scalar, Direction::b_to_a, 16, 1});
  ledger.append({TransferKind::scalar, Direction::b_to_a, 16, 1});
  ledger.append({TransferKind::subvector, Direction::bidirectional, 800, 1});
  ledger.append({TransferKind::block, Direction::a_to_b, 8192, 0});
  CHECK(ledger.size() == 4);
  CHECK(ledger.total_bytes() == 16 + 16 + 800 + 8192);
  CHECK(ledger.count_of(TransferKind::scalar) == 2);
  CHECK(ledger.count_of(TransferKind::scalar, Direction::b_to_a) == 2);
  CHECK(ledger.count_of(TransferKind::scalar, Direction::a_to_b) == 0);
  CHECK(ledger.bytes_of(TransferKind::subvector) == 800);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SolverConfig bad = cfg;
  bad.fraction = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.eps = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.workers_b = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.slowdown_a = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
