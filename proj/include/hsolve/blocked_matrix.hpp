#pragma once

#include <cstddef>
#include <vector>

#include "hsolve/errors.hpp"

namespace hsolve {

// Offset of block (i, j), j <= i < block_rows, in the packed lower triangle.
// Blocks are packed row by row, so the blocks of one block row are contiguous.
std::size_t block_index(std::size_t i, std::size_t j, std::size_t block_rows);

// Dense symmetric positive-definite matrix stored as the packed lower
// triangle of square b x b blocks, each block row-major. The logical side
// length n is padded up to block_rows * b with an identity extension so that
// every kernel works on full blocks and the padded matrix stays SPD.
//
// Only the lower triangle is stored; reads of (p, q) with p < q go through
// the transposed block. The strict upper triangles of diagonal blocks are
// redundant storage: kernels read and maintain only their lower halves, so
// the redundant entries can go stale.
class BlockedSPDMatrix {
public:
  BlockedSPDMatrix(std::size_t n, std::size_t b);

  static BlockedSPDMatrix identity(std::size_t n, std::size_t b);

  std::size_t n() const { return n_; }
  std::size_t block_size() const { return b_; }
  std::size_t block_rows() const { return rows_; }
  std::size_t block_count() const { return rows_ * (rows_ + 1) / 2; }
  std::size_t padded_n() const { return rows_ * b_; }
  std::size_t pad() const { return padded_n() - n_; }

  double* block(std::size_t i, std::size_t j) {
    return values_.data() + block_index(i, j, rows_) * b_ * b_;
  }
  const double* block(std::size_t i, std::size_t j) const {
    return values_.data() + block_index(i, j, rows_) * b_ * b_;
  }

  // Symmetric read of logical element (p, q); p, q < n.
  double element(std::size_t p, std::size_t q) const;
  // Writes logical element (p, q) into its canonical lower-triangle slot.
  void set(std::size_t p, std::size_t q, double value);

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::size_t value_count() const { return values_.size(); }

  // Writes the identity extension into the padding rows/columns of the last
  // block row. Idempotent.
  void apply_identity_padding();

private:
  std::size_t n_ = 0;
  std::size_t b_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

// Length-n vector partitioned at block-row granularity to match a
// BlockedSPDMatrix with the same block size. The padded tail is kept at
// exactly zero.
class BlockVector {
public:
  BlockVector(std::size_t n, std::size_t b);

  std::size_t n() const { return n_; }
  std::size_t block_size() const { return b_; }
  std::size_t block_rows() const { return rows_; }
  std::size_t padded_n() const { return rows_ * b_; }

  double* row(std::size_t i) { return values_.data() + i * b_; }
  const double* row(std::size_t i) const { return values_.data() + i * b_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

private:
  std::size_t n_ = 0;
  std::size_t b_ = 0;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

}  // namespace hsolve
