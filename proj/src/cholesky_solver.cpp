#include "hsolve/cholesky_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hsolve/block_kernels.hpp"

namespace hsolve {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void forward_sub_inplace(const BlockedSPDMatrix& l, BlockVector& y) {
  const std::size_t b = l.block_size();
  for (std::size_t i = 0; i < l.block_rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      kernels::gemv_sub(l.block(i, j), y.row(j), y.row(i), b);
    }
    kernels::lower_solve(l.block(i, i), y.row(i), b);
  }
}

void back_sub_inplace(const BlockedSPDMatrix& l, BlockVector& x) {
  const std::size_t b = l.block_size();
  const std::size_t rows = l.block_rows();
  for (std::size_t ii = rows; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < rows; ++j) {
      kernels::gemv_transpose_sub(l.block(j, ii), x.row(j), x.row(ii), b);
    }
    kernels::lower_transpose_solve(l.block(ii, ii), x.row(ii), b);
  }
}

// State of one factorization: the B-space replica, object handles, and the
// per-column protocol. solve_spd keeps it alive through the solve step so
// the substitution can run on whichever executor holds the factor.
struct FactorRun {
  BlockedSPDMatrix& a;
  const SolverConfig& cfg;
  Runtime& rt;

  std::size_t n_rows, b, bc;
  bool het;
  ExecutorId solo = ExecutorId::a;
  std::optional<BlockedSPDMatrix> mat_b;
  ObjectId o_mat = 0;
  CholeskyPlan plan;
  double setup_transfer = 0.0;

  FactorRun(BlockedSPDMatrix& a_in, const SolverConfig& cfg_in, Runtime& rt_in)
      : a(a_in), cfg(cfg_in), rt(rt_in) {
    n_rows = a.block_rows();
    b = a.block_size();
    bc = a.block_count();
    het = cfg.fraction > 0.0 && cfg.fraction < 1.0;
    if (!het) solo = cfg.fraction == 0.0 ? ExecutorId::a : ExecutorId::b;
  }

  bool homo_b() const { return !het && solo == ExecutorId::b; }

  BlockedSPDMatrix* mat(ExecutorId e) {
    return e == ExecutorId::a ? &a : &*mat_b;
  }

  std::size_t tri(std::size_t i, std::size_t j) const {
    return block_index(i, j, n_rows);
  }

  void setup() {
    if (het || homo_b()) mat_b.emplace(het ? BlockedSPDMatrix(a.n(), b) : a);
    o_mat = rt.register_object("matrix", bc, b * b, 0, a.data(),
                               mat_b ? mat_b->data() : nullptr, !homo_b(),
                               homo_b());
    if (het) {
      plan = CholeskyPlan::for_fraction(cfg.fraction, n_rows);
      const double t0 = rt.transfer_seconds();
      rt.transfer(o_mat, 0, bc, ExecutorId::a, ExecutorId::b,
                  TransferKind::initial_matrix, -1);
      setup_transfer = rt.transfer_seconds() - t0;
    } else {
      plan.fraction = cfg.fraction;
    }
  }

  void submit_potf(ExecutorId e, std::size_t j) {
    BlockedSPDMatrix* m = mat(e);
    const std::size_t d = tri(j, j);
    const std::size_t bb = b;
    rt.submit(e, TaskSet{"potf",
                         {{o_mat, d, d + 1, Access::read_write}},
                         0,
                         1,
                         [m, j, bb](std::size_t) {
                           kernels::potf_block(m->block(j, j), bb);
                         }});
  }

  void submit_trsm(ExecutorId e, std::size_t j, std::size_t rlo,
                   std::size_t rhi) {
    if (rlo >= rhi) return;
    BlockedSPDMatrix* m = mat(e);
    std::vector<Region> regions;
    regions.push_back({o_mat, tri(j, j), tri(j, j) + 1, Access::read});
    for (std::size_t i = rlo; i < rhi; ++i) {
      regions.push_back({o_mat, tri(i, j), tri(i, j) + 1, Access::read_write});
    }
    const std::size_t bb = b;
    rt.submit(e, TaskSet{"trsm", std::move(regions), rlo, rhi,
                         [m, j, bb](std::size_t i) {
                           kernels::trsm_block(m->block(i, j), m->block(j, j),
                                               bb);
                         }});
  }

  void submit_step3(ExecutorId e, std::size_t j, std::size_t rlo,
                    std::size_t rhi) {
    rlo = std::max(rlo, j + 1);
    if (rlo >= rhi) return;
    auto pairs =
        std::make_shared<std::vector<std::pair<std::size_t, std::size_t>>>();
    for (std::size_t i = rlo; i < rhi; ++i) {
      for (std::size_t k = j + 1; k <= i; ++k) pairs->push_back({i, k});
    }
    std::vector<Region> regions;
    for (std::size_t k = j + 1; k < rhi; ++k) {
      regions.push_back({o_mat, tri(k, j), tri(k, j) + 1, Access::read});
    }
    for (std::size_t i = rlo; i < rhi; ++i) {
      regions.push_back(
          {o_mat, tri(i, j + 1), tri(i, i) + 1, Access::read_write});
    }
    BlockedSPDMatrix* m = mat(e);
    const std::size_t bb = b;
    rt.submit(e, TaskSet{"step3_update", std::move(regions), 0, pairs->size(),
                         [m, pairs, j, bb](std::size_t idx) {
                           const auto [i, k] = (*pairs)[idx];
                           if (k == i) {
                             kernels::syrk_update(m->block(i, i),
                                                  m->block(i, j), bb);
                           } else {
                             kernels::gemm_update(m->block(i, k),
                                                  m->block(i, j),
                                                  m->block(k, j), bb);
                           }
                         }});
  }

  void column(std::size_t j) {
    const std::size_t beta = het ? plan.borders[j] : 0;
    if (het && j > 0 && beta > plan.borders[j - 1]) {
      // Border moved down: the crossing rows leave executor B, one whole
      // block row per ledger entry.
      for (std::size_t i = plan.borders[j - 1]; i < beta; ++i) {
        rt.transfer(o_mat, tri(i, 0), tri(i, i) + 1, ExecutorId::b,
                    ExecutorId::a, TransferKind::block_row,
                    static_cast<std::int64_t>(j));
      }
    }
    // Step 1: factor the diagonal block (executor A in heterogeneous mode).
    const ExecutorId e1 = het ? ExecutorId::a : solo;
    submit_potf(e1, j);
    try {
      rt.barrier();
    } catch (const NotSpdError& err) {
      throw NotSpdError(static_cast<std::ptrdiff_t>(j), err.pivot_index());
    }
    if (het) {
      rt.transfer(o_mat, tri(j, j), tri(j, j) + 1, ExecutorId::a,
                  ExecutorId::b, TransferKind::block,
                  static_cast<std::int64_t>(j));
    }
    // Step 2: triangular solves on the sub-column below the diagonal.
    if (het) {
      submit_trsm(ExecutorId::a, j, j + 1, beta);
      submit_trsm(ExecutorId::b, j, std::max(beta, j + 1), n_rows);
    } else {
      submit_trsm(solo, j, j + 1, n_rows);
    }
    rt.barrier();
    if (het) {
      // B's trailing updates read the whole sub-column of this column, so
      // A's freshly solved blocks cross over, one per ledger entry.
      for (std::size_t i = j + 1; i < beta; ++i) {
        rt.transfer(o_mat, tri(i, j), tri(i, j) + 1, ExecutorId::a,
                    ExecutorId::b, TransferKind::block,
                    static_cast<std::int64_t>(j));
      }
    }
    // Step 3: trailing syrk/gemm updates.
    if (het) {
      submit_step3(ExecutorId::a, j, j + 1, beta);
      submit_step3(ExecutorId::b, j, std::max(beta, j + 1), n_rows);
    } else {
      submit_step3(solo, j, j + 1, n_rows);
    }
    rt.barrier();
  }

  void execute() {
    setup();
    for (std::size_t j = 0; j < n_rows; ++j) column(j);
    if (homo_b()) {
      // Homogeneous-B factor lives in B's space; hand it back to the caller.
      std::memcpy(a.data(), mat_b->data(),
                  a.value_count() * sizeof(double));
    }
    check_finite();
  }

  // NaN/Inf produced by the update kernels surfaces here (or earlier as a
  // NotSpdError pivot); stale diagonal upper halves are skipped.
  void check_finite() const {
    for (std::size_t i = 0; i < n_rows; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double* blk = a.block(i, j);
        for (std::size_t r = 0; r < b; ++r) {
          const std::size_t cols = (i == j) ? r + 1 : b;
          for (std::size_t c = 0; c < cols; ++c) {
            if (!std::isfinite(blk[r * b + c])) {
              throw NumericalError("factor has a non-finite value in block (" +
                                   std::to_string(i) + ", " +
                                   std::to_string(j) + ")");
            }
          }
        }
      }
    }
  }
};

}  // namespace

FactorizeStats factorize(BlockedSPDMatrix& a, const SolverConfig& cfg,
                         Runtime& rt) {
  cfg.validate();
  const auto t0 = Clock::now();
  FactorRun run(a, cfg, rt);
  run.execute();
  FactorizeStats stats;
  stats.plan = std::move(run.plan);
  stats.factor_ms = ms_since(t0);
  stats.compute_ms = stats.factor_ms - run.setup_transfer * 1000.0;
  return stats;
}

BlockVector forward_substitute(const BlockedSPDMatrix& l,
                               const BlockVector& rhs) {
  if (rhs.n() != l.n() || rhs.block_size() != l.block_size()) {
    throw ConfigError("factor and right-hand side shapes do not match");
  }
  BlockVector y(rhs);
  forward_sub_inplace(l, y);
  return y;
}

BlockVector back_substitute(const BlockedSPDMatrix& l, const BlockVector& y) {
  if (y.n() != l.n() || y.block_size() != l.block_size()) {
    throw ConfigError("factor and right-hand side shapes do not match");
  }
  BlockVector x(y);
  back_sub_inplace(l, x);
  return x;
}

SpdSolveResult solve_spd(BlockedSPDMatrix& a, const BlockVector& rhs,
                         const SolverConfig& cfg, Runtime& rt) {
  cfg.validate();
  if (rhs.n() != a.n() || rhs.block_size() != a.block_size()) {
    throw ConfigError("matrix and right-hand side shapes do not match");
  }
  const BlockedSPDMatrix original(a);  // kept for the exit diagnostics
  const auto t0 = Clock::now();

  FactorRun run(a, cfg, rt);
  run.execute();
  const double factor_ms = ms_since(t0);

  // Substitutions stay on one executor: B when the factor was computed
  // homogeneously on B, A otherwise.
  const auto t1 = Clock::now();
  const ExecutorId se = run.homo_b() ? ExecutorId::b : ExecutorId::a;
  BlockVector x(rhs);
  const ObjectId o_x = rt.register_object(
      "solve_vector", x.block_rows(), x.block_size(), x.n(),
      se == ExecutorId::a ? x.data() : nullptr,
      se == ExecutorId::b ? x.data() : nullptr, se == ExecutorId::a,
      se == ExecutorId::b);
  const BlockedSPDMatrix* l = run.mat(se);
  BlockVector* xp = &x;
  rt.submit(se, TaskSet{"forward_sub",
                        {{run.o_mat, 0, run.bc, Access::read},
                         {o_x, 0, x.block_rows(), Access::read_write}},
                        0,
                        1,
                        [l, xp](std::size_t) { forward_sub_inplace(*l, *xp); }});
  rt.submit(se, TaskSet{"back_sub",
                        {{run.o_mat, 0, run.bc, Access::read},
                         {o_x, 0, x.block_rows(), Access::read_write}},
                        0,
                        1,
                        [l, xp](std::size_t) { back_sub_inplace(*l, *xp); }});
  rt.barrier();
  const double solve_ms = ms_since(t1);

  SpdSolveStats stats;
  stats.plan = std::move(run.plan);
  stats.factor_ms = factor_ms;
  stats.solve_ms = solve_ms;
  stats.wall_ms = ms_since(t0);
  stats.compute_ms = stats.wall_ms - run.setup_transfer * 1000.0;

  // Exit diagnostics against the original matrix (not timed).
  BlockVector ax(a.n(), a.block_size());
  kernels::symv_range(original, x, ax, 0, a.block_rows());
  BlockVector res(a.n(), a.block_size());
  kernels::sub_range(res, rhs, ax, 0, a.block_rows());
  stats.true_residual =
      std::sqrt(kernels::dot_range(res, res, 0, a.block_rows()));

  return SpdSolveResult{std::move(x), std::move(stats)};
}

}  // namespace hsolve
