#pragma once

#include <cstddef>

#include "hsolve/blocked_matrix.hpp"
#include "hsolve/dd.hpp"

// Dense FP64 kernels on single blocks and block-row ranges. Accumulation
// order is pinned everywhere: every output element is produced by one
// sequential chain over ascending indices. Parallel callers may split work
// across blocks or output rows, never inside one element's sum, so
// heterogeneous runs reproduce homogeneous results bitwise.
//
// Per the NaN policy, the update kernels do not scan their results; solvers
// check for non-finite values at their own checkpoints.
namespace hsolve::kernels {

// In-place Cholesky factor of the lower triangle of d: row by row,
// off-diagonal elements left to right, then the diagonal. The strict upper
// triangle is left untouched. Throws NotSpdError (block_row = -1) on a
// non-positive or NaN pivot.
void potf_block(double* d, std::size_t b);

// Solves X * L^T = X_in in place, per row of X in column-of-L order.
// Throws SingularBlockError on a zero or NaN diagonal of l.
void trsm_block(double* x, const double* l, std::size_t b);

// c -= p * q^T, inner accumulation over the shared dimension ascending.
void gemm_update(double* c, const double* p, const double* q, std::size_t b);

// lower(c) -= lower(p * p^T); the strict upper triangle of c is untouched.
void syrk_update(double* c, const double* p, std::size_t b);

// y_i = sum_j A_ij x_j for output block rows i in [lo, hi), using the packed
// symmetric storage (transposed reads for j > i, lower-triangle-only reads
// of the diagonal block). Every output element accumulates over ascending j
// then ascending in-block column.
void symv_range(const BlockedSPDMatrix& a, const BlockVector& x,
                BlockVector& y, std::size_t lo, std::size_t hi);
void symv_row(const BlockedSPDMatrix& a, const BlockVector& x, BlockVector& y,
              std::size_t row);

// Sequential dot product of one block row (the padded tail contributes
// exact zeros).
double row_dot(const BlockVector& u, const BlockVector& v, std::size_t row);

// Compensated sum of row_dot over rows in [lo, hi), ascending. Partials over
// adjacent ranges are combined with dd_add by the solvers; see dd.hpp.
Dd dot_rows(const BlockVector& u, const BlockVector& v, std::size_t lo,
            std::size_t hi);
double dot_range(const BlockVector& u, const BlockVector& v, std::size_t lo,
                 std::size_t hi);

// y += alpha * x over block rows [lo, hi).
void axpy_range(BlockVector& y, const BlockVector& x, double alpha,
                std::size_t lo, std::size_t hi);
// s = r + beta * s over block rows [lo, hi).
void xpay_range(BlockVector& s, const BlockVector& r, double beta,
                std::size_t lo, std::size_t hi);
// out = a - b over block rows [lo, hi).
void sub_range(BlockVector& out, const BlockVector& a, const BlockVector& b,
               std::size_t lo, std::size_t hi);

// y -= M x and y -= M^T x for one dense b x b block.
void gemv_sub(const double* m, const double* x, double* y, std::size_t b);
void gemv_transpose_sub(const double* m, const double* x, double* y,
                        std::size_t b);

// In-place triangular solves with the lower triangle of l; throw
// SingularBlockError on a zero or NaN diagonal.
void lower_solve(const double* l, double* y, std::size_t b);
void lower_transpose_solve(const double* l, double* y, std::size_t b);

}  // namespace hsolve::kernels
