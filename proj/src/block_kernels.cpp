#include "hsolve/block_kernels.hpp"

#include <cmath>

#include "hsolve/errors.hpp"

namespace hsolve::kernels {

void potf_block(double* d, std::size_t b) {
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = 0; q < p; ++q) {
      double acc = d[p * b + q];
      for (std::size_t k = 0; k < q; ++k) acc -= d[p * b + k] * d[q * b + k];
      d[p * b + q] = acc / d[q * b + q];
    }
    double acc = d[p * b + p];
    for (std::size_t k = 0; k < p; ++k) acc -= d[p * b + k] * d[p * b + k];
    if (!(acc > 0.0)) throw NotSpdError(-1, p);
    d[p * b + p] = std::sqrt(acc);
  }
}

void trsm_block(double* x, const double* l, std::size_t b) {
  for (std::size_t c = 0; c < b; ++c) {
    const double diag = l[c * b + c];
    if (diag == 0.0 || std::isnan(diag)) throw SingularBlockError(c);
  }
  // X L^T = B row by row: each row of X solves L x_row^T = b_row^T.
  for (std::size_t r = 0; r < b; ++r) {
    double* xr = x + r * b;
    for (std::size_t c = 0; c < b; ++c) {
      double acc = xr[c];
      for (std::size_t k = 0; k < c; ++k) acc -= xr[k] * l[c * b + k];
      xr[c] = acc / l[c * b + c];
    }
  }
}

void gemm_update(double* c, const double* p, const double* q, std::size_t b) {
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t col = 0; col < b; ++col) {
      double acc = 0.0;
      for (std::size_t k = 0; k < b; ++k) acc += p[r * b + k] * q[col * b + k];
      c[r * b + col] -= acc;
    }
  }
}

void syrk_update(double* c, const double* p, std::size_t b) {
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t col = 0; col <= r; ++col) {
      double acc = 0.0;
      for (std::size_t k = 0; k < b; ++k) acc += p[r * b + k] * p[col * b + k];
      c[r * b + col] -= acc;
    }
  }
}

void symv_row(const BlockedSPDMatrix& a, const BlockVector& x, BlockVector& y,
              std::size_t row) {
  const std::size_t b = a.block_size();
  const std::size_t nrows = a.block_rows();
  double* out = y.row(row);
  for (std::size_t r = 0; r < b; ++r) out[r] = 0.0;
  // Per output element, terms accumulate over ascending j then ascending c;
  // iterating j-major with out[] as the accumulator preserves that chain.
  for (std::size_t j = 0; j < nrows; ++j) {
    const double* xj = x.row(j);
    if (j < row) {
      const double* blk = a.block(row, j);
      for (std::size_t r = 0; r < b; ++r) {
        double acc = out[r];
        for (std::size_t c = 0; c < b; ++c) acc += blk[r * b + c] * xj[c];
        out[r] = acc;
      }
    } else if (j == row) {
      const double* blk = a.block(row, row);
      for (std::size_t r = 0; r < b; ++r) {
        double acc = out[r];
        for (std::size_t c = 0; c < b; ++c) {
          const double v = (c <= r) ? blk[r * b + c] : blk[c * b + r];
          acc += v * xj[c];
        }
        out[r] = acc;
      }
    } else {
      const double* blk = a.block(j, row);  // transposed read
      for (std::size_t r = 0; r < b; ++r) {
        double acc = out[r];
        for (std::size_t c = 0; c < b; ++c) acc += blk[c * b + r] * xj[c];
        out[r] = acc;
      }
    }
  }
}

void symv_range(const BlockedSPDMatrix& a, const BlockVector& x,
                BlockVector& y, std::size_t lo, std::size_t hi) {
  for (std::size_t i = lo; i < hi; ++i) symv_row(a, x, y, i);
}

double row_dot(const BlockVector& u, const BlockVector& v, std::size_t row) {
  const std::size_t b = u.block_size();
  const double* ur = u.row(row);
  const double* vr = v.row(row);
  double acc = 0.0;
  for (std::size_t c = 0; c < b; ++c) acc += ur[c] * vr[c];
  return acc;
}

Dd dot_rows(const BlockVector& u, const BlockVector& v, std::size_t lo,
            std::size_t hi) {
  Dd acc;
  for (std::size_t i = lo; i < hi; ++i) acc = dd_add(acc, row_dot(u, v, i));
  return acc;
}

double dot_range(const BlockVector& u, const BlockVector& v, std::size_t lo,
                 std::size_t hi) {
  return dd_value(dot_rows(u, v, lo, hi));
}

void axpy_range(BlockVector& y, const BlockVector& x, double alpha,
                std::size_t lo, std::size_t hi) {
  const std::size_t b = y.block_size();
  for (std::size_t i = lo; i < hi; ++i) {
    double* yr = y.row(i);
    const double* xr = x.row(i);
    for (std::size_t c = 0; c < b; ++c) yr[c] += alpha * xr[c];
  }
}

void xpay_range(BlockVector& s, const BlockVector& r, double beta,
                std::size_t lo, std::size_t hi) {
  const std::size_t b = s.block_size();
  for (std::size_t i = lo; i < hi; ++i) {
    double* sr = s.row(i);
    const double* rr = r.row(i);
    for (std::size_t c = 0; c < b; ++c) sr[c] = rr[c] + beta * sr[c];
  }
}

void sub_range(BlockVector& out, const BlockVector& a, const BlockVector& b,
               std::size_t lo, std::size_t hi) {
  const std::size_t bs = out.block_size();
  for (std::size_t i = lo; i < hi; ++i) {
    double* o = out.row(i);
    const double* ar = a.row(i);
    const double* br = b.row(i);
    for (std::size_t c = 0; c < bs; ++c) o[c] = ar[c] - br[c];
  }
}

void gemv_sub(const double* m, const double* x, double* y, std::size_t b) {
  for (std::size_t r = 0; r < b; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < b; ++c) acc += m[r * b + c] * x[c];
    y[r] -= acc;
  }
}

void gemv_transpose_sub(const double* m, const double* x, double* y,
                        std::size_t b) {
  for (std::size_t r = 0; r < b; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < b; ++c) acc += m[c * b + r] * x[c];
    y[r] -= acc;
  }
}

void lower_solve(const double* l, double* y, std::size_t b) {
  for (std::size_t r = 0; r < b; ++r) {
    const double diag = l[r * b + r];
    if (diag == 0.0 || std::isnan(diag)) throw SingularBlockError(r);
    double acc = y[r];
    for (std::size_t c = 0; c < r; ++c) acc -= l[r * b + c] * y[c];
    y[r] = acc / diag;
  }
}

void lower_transpose_solve(const double* l, double* y, std::size_t b) {
  for (std::size_t rr = b; rr-- > 0;) {
    const double diag = l[rr * b + rr];
    if (diag == 0.0 || std::isnan(diag)) throw SingularBlockError(rr);
    double acc = y[rr];
    for (std::size_t c = rr + 1; c < b; ++c) acc -= l[c * b + rr] * y[c];
    y[rr] = acc / diag;
  }
}

}  // namespace hsolve::kernels
