#pragma once

#include <cstddef>

#include "hsolve/blocked_matrix.hpp"
#include "hsolve/executor.hpp"
#include "hsolve/partition.hpp"
#include "hsolve/solver_config.hpp"

namespace hsolve {

struct FactorizeStats {
  CholeskyPlan plan;
  double factor_ms = 0.0;
  double compute_ms = 0.0;  // factor time minus the setup transfer
};

struct SpdSolveStats {
  CholeskyPlan plan;
  double factor_ms = 0.0;
  double solve_ms = 0.0;  // forward + back substitution
  double wall_ms = 0.0;
  double compute_ms = 0.0;
  double true_residual = 0.0;  // ||rhs - A x||_2 with the original A
};

struct SpdSolveResult {
  BlockVector x;
  SpdSolveStats stats;
};

// In-place blocked right-looking Cholesky factorization: on return the lower
// blocks of a hold L with L L^T equal to the input (on the logical n x n
// system; the identity padding factors to identity). The strict upper
// triangles of diagonal blocks are left stale.
//
// cfg.fraction 0/1 run homogeneously on one executor with no cross-space
// traffic. In heterogeneous mode each column j splits at the border
// beta_j = cholesky_border(cfg.fraction, j, N): executor A factors the
// diagonal block, both executors run their share of the triangular solves
// and trailing updates, the diagonal block and A's solved sub-column blocks
// cross to B, and rows passing a moving border cross back one block row at
// a time. Throws NotSpdError (with the failing column) or NumericalError.
FactorizeStats factorize(BlockedSPDMatrix& a, const SolverConfig& cfg,
                         Runtime& rt);

// Single-executor triangular solves with the factor produced by factorize:
// L y = rhs (block-forward) and L^T x = y (block-backward, transposed
// reads). Throw SingularBlockError on a zero diagonal.
BlockVector forward_substitute(const BlockedSPDMatrix& l,
                               const BlockVector& rhs);
BlockVector back_substitute(const BlockedSPDMatrix& l, const BlockVector& y);

// factorize + forward/back substitution. The solve step always runs on a
// single executor: B after a homogeneous-B factorization, A otherwise.
// Destroys a (it holds L afterwards).
SpdSolveResult solve_spd(BlockedSPDMatrix& a, const BlockVector& rhs,
                         const SolverConfig& cfg, Runtime& rt);

}  // namespace hsolve
