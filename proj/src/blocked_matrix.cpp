#include "hsolve/blocked_matrix.hpp"

#include <stdexcept>
#include <string>

namespace hsolve {

std::size_t block_index(std::size_t i, std::size_t j, std::size_t block_rows) {
  if (i >= block_rows || j > i) {
    throw std::out_of_range("block_index(" + std::to_string(i) + ", " +
                            std::to_string(j) + ") out of range for " +
                            std::to_string(block_rows) + " block rows");
  }
  return i * (i + 1) / 2 + j;
}

BlockedSPDMatrix::BlockedSPDMatrix(std::size_t n, std::size_t b)
    : n_(n), b_(b), rows_((n + b - 1) / b) {
  if (n == 0 || b == 0) {
    throw ConfigError("matrix size and block size must be positive");
  }
  values_.assign(block_count() * b_ * b_, 0.0);
  apply_identity_padding();
}

BlockedSPDMatrix BlockedSPDMatrix::identity(std::size_t n, std::size_t b) {
  BlockedSPDMatrix m(n, b);
  for (std::size_t i = 0; i < m.block_rows(); ++i) {
    double* d = m.block(i, i);
    for (std::size_t r = 0; r < b; ++r) d[r * b + r] = 1.0;
  }
  return m;
}

double BlockedSPDMatrix::element(std::size_t p, std::size_t q) const {
  if (p >= n_ || q >= n_) {
    throw std::out_of_range("element(" + std::to_string(p) + ", " +
                            std::to_string(q) + ") out of range for n = " +
                            std::to_string(n_));
  }
  // Canonicalize to the stored lower triangle; the strict upper halves of
  // diagonal blocks are redundant and may be stale.
  if (p < q) std::swap(p, q);
  return block(p / b_, q / b_)[(p % b_) * b_ + (q % b_)];
}

void BlockedSPDMatrix::set(std::size_t p, std::size_t q, double value) {
  if (p >= n_ || q >= n_) {
    throw std::out_of_range("set(" + std::to_string(p) + ", " +
                            std::to_string(q) + ") out of range for n = " +
                            std::to_string(n_));
  }
  if (p < q) std::swap(p, q);
  block(p / b_, q / b_)[(p % b_) * b_ + (q % b_)] = value;
}

void BlockedSPDMatrix::apply_identity_padding() {
  if (pad() == 0) return;
  // Padding lives in the trailing rows of the last block row: in the stored
  // lower triangle, any element with a padding column index also has a
  // padding row index.
  const std::size_t last = rows_ - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    double* d = block(last, j);
    for (std::size_t r = 0; r < b_; ++r) {
      const std::size_t p = last * b_ + r;
      if (p < n_) continue;
      for (std::size_t c = 0; c < b_; ++c) {
        const std::size_t q = j * b_ + c;
        d[r * b_ + c] = (p == q) ? 1.0 : 0.0;
      }
    }
  }
}

BlockVector::BlockVector(std::size_t n, std::size_t b)
    : n_(n), b_(b), rows_((n + b - 1) / b) {
  if (n == 0 || b == 0) {
    throw ConfigError("vector size and block size must be positive");
  }
  values_.assign(rows_ * b_, 0.0);
}

}  // namespace hsolve
