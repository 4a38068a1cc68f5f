#pragma once

#include <cstddef>
#include <cstdint>

namespace hsolve {

// Shared knobs for both solvers and the executor pair. fraction selects the
// execution mode: exactly 0.0 runs everything on executor A, exactly 1.0 on
// executor B (homogeneous modes, no cross-space traffic); anything in between
// runs heterogeneously.
struct SolverConfig {
  double eps = 1e-6;                    // CG termination tolerance
  std::size_t max_iters = 500;
  std::size_t recompute_interval = 50;  // 0 disables true-residual recomputes
  double fraction = 0.0;
  std::size_t block_size = 32;
  std::size_t workers_a = 2;
  std::size_t workers_b = 2;
  double slowdown_a = 1.0;  // artificial per-task slowdown, >= 1
  double slowdown_b = 1.0;
  std::uint64_t seed = 42;
  bool record_trace = false;  // keep per-iteration (u, alpha, beta) in stats

  void validate() const;  // throws ConfigError
};

}  // namespace hsolve
