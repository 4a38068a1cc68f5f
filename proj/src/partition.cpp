#include "hsolve/partition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hsolve/errors.hpp"

namespace hsolve {

Partition partition_for_fraction(double fraction, std::size_t block_rows) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("split fraction must be in [0, 1], got " +
                      std::to_string(fraction));
  }
  if (block_rows == 0) {
    throw ConfigError("partition requires at least one block row");
  }
  const auto r = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(block_rows) + 0.5));
  return Partition{r, fraction};
}

std::size_t cholesky_border(double fraction, std::size_t column,
                            std::size_t block_rows) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("split fraction must be in [0, 1], got " +
                      std::to_string(fraction));
  }
  if (column >= block_rows) {
    throw std::out_of_range("cholesky_border column " + std::to_string(column) +
                            " out of range for " + std::to_string(block_rows) +
                            " block rows");
  }
  const std::size_t n = block_rows;
  const std::size_t t = n - 1 - column;
  const double budget =
      fraction * static_cast<double>(t * (t + 1) / 2);
  // Trailing blocks in rows >= beta: sum_{i=beta}^{n-1} (i - column). The sum
  // shrinks as beta grows; take the first beta that fits the budget.
  for (std::size_t beta = column + 1; beta <= n; ++beta) {
    const std::size_t k = beta - column;  // first B row is column + k
    const std::size_t below = (t * (t + 1) - (k - 1) * k) / 2;
    if (static_cast<double>(below) <= budget) return beta;
  }
  return n;
}

CholeskyPlan CholeskyPlan::for_fraction(double fraction,
                                        std::size_t block_rows) {
  CholeskyPlan plan;
  plan.fraction = fraction;
  plan.borders.resize(block_rows);
  for (std::size_t j = 0; j < block_rows; ++j) {
    plan.borders[j] = cholesky_border(fraction, j, block_rows);
    if (j > 0 && plan.borders[j] > plan.borders[j - 1]) {
      plan.shifts.push_back({j, plan.borders[j] - plan.borders[j - 1]});
    }
  }
  return plan;
}

std::size_t CholeskyPlan::blocks_on_b(std::size_t column) const {
  const std::size_t n = borders.size();
  const std::size_t t = n - 1 - column;
  const std::size_t k = borders[column] - column;
  return (t * (t + 1) - (k - 1) * k) / 2;
}

std::size_t CholeskyPlan::trailing_blocks(std::size_t column,
                                          std::size_t block_rows) {
  const std::size_t t = block_rows - 1 - column;
  return t * (t + 1) / 2;
}

}  // namespace hsolve
