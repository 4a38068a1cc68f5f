#pragma once

#include <cstddef>
#include <vector>

namespace hsolve {

// Row split for the iterative solver: block rows [0, split_row) belong to
// executor B (accelerator role, upper part of the vectors), block rows
// [split_row, block_rows) to executor A (host role, lower part).
struct Partition {
  std::size_t split_row = 0;
  double fraction = 0.0;
};

// split_row = round(fraction * block_rows), ties rounding half-up.
// Throws ConfigError for fraction outside [0, 1].
Partition partition_for_fraction(double fraction, std::size_t block_rows);

// Border for factorization column j: block rows [j, beta) above the border
// are processed by executor A, rows [beta, block_rows) by executor B.
// Returns the smallest beta in [j+1, block_rows] such that the trailing-
// update blocks in rows >= beta are at most fraction * (all trailing-update
// blocks of column j).
std::size_t cholesky_border(double fraction, std::size_t column,
                            std::size_t block_rows);

struct ShiftEvent {
  std::size_t column = 0;      // border takes effect at this column
  std::size_t rows_moved = 0;  // block rows crossing from B to A
};

// Precomputed border sequence and the resulting shift schedule for one
// factorization.
struct CholeskyPlan {
  double fraction = 0.0;
  std::vector<std::size_t> borders;  // beta_j, one per column
  std::vector<ShiftEvent> shifts;

  static CholeskyPlan for_fraction(double fraction, std::size_t block_rows);

  // Trailing-update blocks in rows >= borders[j] for column j.
  std::size_t blocks_on_b(std::size_t column) const;
  // All trailing-update blocks of column j.
  static std::size_t trailing_blocks(std::size_t column,
                                     std::size_t block_rows);
};

}  // namespace hsolve
