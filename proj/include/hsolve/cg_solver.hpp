#pragma once

#include <cstddef>
#include <vector>

#include "hsolve/blocked_matrix.hpp"
#include "hsolve/executor.hpp"
#include "hsolve/partition.hpp"
#include "hsolve/solver_config.hpp"

namespace hsolve {

struct CgIteration {
  double u;      // squared residual norm maintained by the recurrence
  double alpha;
  double beta;
};

struct CgStats {
  std::size_t iterations = 0;
  std::size_t recomputations = 0;
  bool converged = false;
  double u0 = 0.0;
  double true_residual = 0.0;  // ||rhs - A x||_2 at exit
  double wall_ms = 0.0;
  double compute_ms = 0.0;  // wall time minus setup/result transfer time
  Partition partition;
  std::vector<CgIteration> trace;  // filled when cfg.record_trace
};

struct CgResult {
  BlockVector x;
  CgStats stats;
};

// Conjugate gradient solve of A x = rhs from x0 = 0, iterating until the
// recurrence value u = r^T r satisfies u <= eps^2 * u0 or max_iters is
// reached (NotConverged is a status, not an exception, so capped runs stay
// comparable). cfg.fraction selects the mode: 0 and 1 run on a single
// executor with no cross-space traffic; anything in between splits every
// vector and matrix-vector operation at the partition row, with B's partial
// scalars shipped to A and the direction vector exchanged once per iteration.
// Every recompute_interval-th iteration replaces the residual update by the
// explicitly recomputed rhs - A x, costing one extra sub-vector exchange.
//
// The Runtime must be freshly constructed for this solve; its ledger holds
// the communication record afterwards.
CgResult solve_cg(const BlockedSPDMatrix& a, const BlockVector& rhs,
                  const SolverConfig& cfg, Runtime& rt);

}  // namespace hsolve
