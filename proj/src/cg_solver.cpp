#include "hsolve/cg_solver.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "hsolve/block_kernels.hpp"
#include "hsolve/dd.hpp"

namespace hsolve {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// One solve's worth of per-space buffers, object handles, and protocol steps.
struct CgRun {
  const BlockedSPDMatrix& a;
  const BlockVector& rhs;
  const SolverConfig& cfg;
  Runtime& rt;

  std::size_t n_rows;
  std::size_t split;  // block rows [0, split) on B, [split, n_rows) on A
  bool het;
  ExecutorId solo = ExecutorId::a;  // homogeneous target when !het

  std::optional<BlockedSPDMatrix> mat_b;
  std::optional<BlockVector> rhs_a, rhs_b;
  std::optional<BlockVector> r_a, r_b, s_a, s_b, t_a, t_b, x_a, x_b;
  std::vector<double> partials_a, partials_b;
  double slot_b_partial[2][2] = {};  // [space][hi, lo]
  double slot_a_partial[2][2] = {};

  ObjectId o_mat = 0, o_rhs = 0, o_r = 0, o_s = 0, o_t = 0, o_x = 0;
  ObjectId o_part = 0, o_slot_b = 0, o_slot_a = 0;

  std::int64_t step = 0;

  CgRun(const BlockedSPDMatrix& a_in, const BlockVector& rhs_in,
        const SolverConfig& cfg_in, Runtime& rt_in)
      : a(a_in), rhs(rhs_in), cfg(cfg_in), rt(rt_in) {
    n_rows = a.block_rows();
    het = cfg.fraction > 0.0 && cfg.fraction < 1.0;
    if (het) {
      split = partition_for_fraction(cfg.fraction, n_rows).split_row;
    } else {
      solo = cfg.fraction == 0.0 ? ExecutorId::a : ExecutorId::b;
      split = solo == ExecutorId::b ? n_rows : 0;
    }
  }

  bool on_a() const { return het || solo == ExecutorId::a; }
  bool on_b() const { return het || solo == ExecutorId::b; }

  const BlockedSPDMatrix* mat(ExecutorId e) const {
    return e == ExecutorId::a ? &a : &*mat_b;
  }
  BlockVector* vec(std::optional<BlockVector>& va,
                   std::optional<BlockVector>& vb, ExecutorId e) {
    auto& v = e == ExecutorId::a ? va : vb;
    return v ? &*v : nullptr;
  }

  void setup() {
    const std::size_t n = a.n();
    const std::size_t b = a.block_size();
    const std::size_t bc = a.block_count();
    if (on_a()) {
      rhs_a.emplace(rhs);
      r_a.emplace(rhs);
      s_a.emplace(rhs);
      t_a.emplace(n, b);
      x_a.emplace(n, b);
      partials_a.assign(n_rows, 0.0);
    }
    if (on_b()) {
      rhs_b.emplace(het ? BlockVector(n, b) : rhs);
      r_b.emplace(rhs);
      s_b.emplace(rhs);
      t_b.emplace(n, b);
      x_b.emplace(n, b);
      partials_b.assign(n_rows, 0.0);
      mat_b.emplace(het ? BlockedSPDMatrix(n, b) : a);
    }

    auto buf = [](std::optional<BlockVector>& v) {
      return v ? v->data() : nullptr;
    };
    const bool res_a = on_a();
    const bool res_b_init = on_b() && !het;  // het replicas arrive by transfer
    o_mat = rt.register_object("matrix", bc, b * b, 0,
                               const_cast<double*>(a.data()),
                               mat_b ? mat_b->data() : nullptr, res_a,
                               res_b_init);
    o_rhs = rt.register_object("rhs", n_rows, b, n, buf(rhs_a), buf(rhs_b),
                               res_a, res_b_init);
    // r, s, t, x start with identical content in both spaces (r = s = rhs,
    // t = x = 0), prepared host-side before the run begins.
    o_r = rt.register_object("r", n_rows, b, n, buf(r_a), buf(r_b), on_a(),
                             on_b());
    o_s = rt.register_object("s", n_rows, b, n, buf(s_a), buf(s_b), on_a(),
                             on_b());
    o_t = rt.register_object("t", n_rows, b, n, buf(t_a), buf(t_b), on_a(),
                             on_b());
    o_x = rt.register_object("x", n_rows, b, n, buf(x_a), buf(x_b), on_a(),
                             on_b());
    o_part = rt.register_object("dot_partials", n_rows, 1, 0,
                                on_a() ? partials_a.data() : nullptr,
                                on_b() ? partials_b.data() : nullptr, on_a(),
                                on_b());
    o_slot_b = rt.register_object("partial_slot_b", 1, 2, 0, slot_b_partial[0],
                                  slot_b_partial[1], true, true);
    o_slot_a = rt.register_object("partial_slot_a", 1, 2, 0, slot_a_partial[0],
                                  slot_a_partial[1], true, true);

    if (het) {
      rt.transfer(o_mat, 0, bc, ExecutorId::a, ExecutorId::b,
                  TransferKind::initial_matrix, -1);
      rt.transfer(o_rhs, 0, n_rows, ExecutorId::a, ExecutorId::b,
                  TransferKind::initial_matrix, -1);
    }
  }

  // Submits fn over the executor's own block rows; no-op for an empty range.
  void for_own_rows(ExecutorId e, const char* tag, std::vector<Region> regions,
                    std::function<void(std::size_t)> body) {
    const std::size_t lo = e == ExecutorId::b ? 0 : split;
    const std::size_t hi = e == ExecutorId::b ? split : n_rows;
    if (!het) {
      if (e != solo) return;
      rt.submit(e, TaskSet{tag, std::move(regions), 0, n_rows, std::move(body)});
      return;
    }
    rt.submit(e, TaskSet{tag, std::move(regions), lo, hi, std::move(body)});
  }

  std::pair<std::size_t, std::size_t> own_rows(ExecutorId e) const {
    if (!het) return {0, n_rows};
    return e == ExecutorId::b ? std::pair<std::size_t, std::size_t>{0, split}
                              : std::pair<std::size_t, std::size_t>{split,
                                                                    n_rows};
  }

  // t = A * v over each executor's rows (line 4 and the recompute matvec).
  void matvec(ObjectId o_in, std::optional<BlockVector>& in_a,
              std::optional<BlockVector>& in_b) {
    for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
      if (!het && e != solo) continue;
      auto [lo, hi] = own_rows(e);
      const BlockedSPDMatrix* m = mat(e);
      const BlockVector* in = vec(in_a, in_b, e);
      BlockVector* out = vec(t_a, t_b, e);
      rt.submit(e, TaskSet{"symv",
                           {{o_mat, 0, a.block_count(), Access::read},
                            {o_in, 0, n_rows, Access::read},
                            {o_t, lo, hi, Access::read_write}},
                           lo,
                           hi,
                           [m, in, out](std::size_t i) {
                             kernels::symv_row(*m, *in, *out, i);
                           }});
    }
  }

  // Scalar product of two distributed vectors: per-row partials and a
  // compensated per-executor reduction, then B's partial crosses to A (one
  // scalar transfer) and the two partials combine in ascending-range order.
  double dot(ObjectId o_u, std::optional<BlockVector>& u_a,
             std::optional<BlockVector>& u_b, ObjectId o_v,
             std::optional<BlockVector>& v_a, std::optional<BlockVector>& v_b) {
    for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
      if (!het && e != solo) continue;
      auto [lo, hi] = own_rows(e);
      const BlockVector* u = vec(u_a, u_b, e);
      const BlockVector* v = vec(v_a, v_b, e);
      double* parts = e == ExecutorId::a ? partials_a.data()
                                         : partials_b.data();
      rt.submit(e, TaskSet{"row_dot",
                           {{o_u, lo, hi, Access::read},
                            {o_v, lo, hi, Access::read},
                            {o_part, lo, hi, Access::read_write}},
                           lo,
                           hi,
                           [u, v, parts](std::size_t i) {
                             parts[i] = kernels::row_dot(*u, *v, i);
                           }});
      const ObjectId o_slot = e == ExecutorId::a ? o_slot_a : o_slot_b;
      double* slot = (e == ExecutorId::a ? slot_a_partial
                                         : slot_b_partial)[static_cast<int>(e)];
      rt.submit(e, TaskSet{"dot_reduce",
                           {{o_part, lo, hi, Access::read},
                            {o_slot, 0, 1, Access::read_write}},
                           0,
                           1,
                           [parts, slot, lo = lo, hi = hi](std::size_t) {
                             Dd acc;
                             for (std::size_t i = lo; i < hi; ++i) {
                               acc = dd_add(acc, parts[i]);
                             }
                             slot[0] = acc.hi;
                             slot[1] = acc.lo;
                           }});
    }
    rt.barrier();
    if (het) {
      rt.transfer(o_slot_b, 0, 1, ExecutorId::b, ExecutorId::a,
                  TransferKind::scalar, step);
      const Dd pb = rt.read_slot(o_slot_b, ExecutorId::a);
      const Dd pa = rt.read_slot(o_slot_a, ExecutorId::a);
      return dd_value(dd_add(pb, pa));
    }
    const ObjectId o_slot = solo == ExecutorId::a ? o_slot_a : o_slot_b;
    return dd_value(rt.read_slot(o_slot, solo));
  }
};

}  // namespace

CgResult solve_cg(const BlockedSPDMatrix& a, const BlockVector& rhs,
                  const SolverConfig& cfg, Runtime& rt) {
  cfg.validate();
  if (rhs.n() != a.n() || rhs.block_size() != a.block_size()) {
    throw ConfigError("matrix and right-hand side shapes do not match");
  }

  const auto t_start = Clock::now();
  CgRun run(a, rhs, cfg, rt);
  const double setup_transfer0 = rt.transfer_seconds();
  run.setup();
  const double setup_transfer = rt.transfer_seconds() - setup_transfer0;

  CgStats stats;
  stats.partition = Partition{run.split, cfg.fraction};

  const std::size_t n_rows = run.n_rows;

  // u0 = r0^T r0 with x0 = 0, i.e. dot(rhs, rhs): a host-side value on the
  // executor that owns the original data, identical for every split.
  const double u0 = kernels::dot_range(rhs, rhs, 0, n_rows);
  if (!std::isfinite(u0)) {
    throw NumericalError("initial residual is not finite");
  }
  stats.u0 = u0;
  const double limit = cfg.eps * cfg.eps * u0;

  double u = u0;
  if (u > limit) {
    for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
      run.step = static_cast<std::int64_t>(iter);
      // line 4: t = A s
      run.matvec(run.o_s, run.s_a, run.s_b);
      rt.barrier();
      // line 5: alpha = u / (s^T t)
      const double st =
          run.dot(run.o_s, run.s_a, run.s_b, run.o_t, run.t_a, run.t_b);
      const double alpha = u / st;
      if (!std::isfinite(alpha)) {
        throw NumericalError("alpha is not finite at iteration " +
                             std::to_string(iter));
      }
      // line 6: x = x + alpha s
      for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
        auto [lo, hi] = run.own_rows(e);
        BlockVector* x = run.vec(run.x_a, run.x_b, e);
        const BlockVector* s = run.vec(run.s_a, run.s_b, e);
        run.for_own_rows(e, "axpy_x",
                         {{run.o_s, lo, hi, Access::read},
                          {run.o_x, lo, hi, Access::read_write}},
                         [x, s, alpha](std::size_t i) {
                           kernels::axpy_range(*x, *s, alpha, i, i + 1);
                         });
      }
      const bool recompute = cfg.recompute_interval > 0 &&
                             iter % cfg.recompute_interval == 0;
      if (recompute) {
        // line 7 replaced by r = rhs - A x: x was just updated on both
        // sides, so it must be exchanged before the extra matvec.
        ++stats.recomputations;
        rt.barrier();
        if (run.het) rt.exchange_subvector(run.o_x, run.split, run.step);
        run.matvec(run.o_x, run.x_a, run.x_b);
        for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
          auto [lo, hi] = run.own_rows(e);
          BlockVector* r = run.vec(run.r_a, run.r_b, e);
          const BlockVector* rh = run.vec(run.rhs_a, run.rhs_b, e);
          const BlockVector* t = run.vec(run.t_a, run.t_b, e);
          run.for_own_rows(e, "residual",
                           {{run.o_rhs, lo, hi, Access::read},
                            {run.o_t, lo, hi, Access::read},
                            {run.o_r, lo, hi, Access::read_write}},
                           [r, rh, t](std::size_t i) {
                             kernels::sub_range(*r, *rh, *t, i, i + 1);
                           });
        }
      } else {
        // line 7: r = r - alpha t
        for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
          auto [lo, hi] = run.own_rows(e);
          BlockVector* r = run.vec(run.r_a, run.r_b, e);
          const BlockVector* t = run.vec(run.t_a, run.t_b, e);
          run.for_own_rows(e, "axpy_r",
                           {{run.o_t, lo, hi, Access::read},
                            {run.o_r, lo, hi, Access::read_write}},
                           [r, t, alpha](std::size_t i) {
                             kernels::axpy_range(*r, *t, -alpha, i, i + 1);
                           });
        }
      }
      // lines 8-10: v = u; u = r^T r; beta = u / v
      const double v = u;
      u = run.dot(run.o_r, run.r_a, run.r_b, run.o_r, run.r_a, run.r_b);
      if (!(u >= 0.0) || !std::isfinite(u)) {
        throw NumericalError("residual norm is not finite at iteration " +
                             std::to_string(iter));
      }
      const double beta = u / v;
      // line 11: s = r + beta s
      for (ExecutorId e : {ExecutorId::b, ExecutorId::a}) {
        auto [lo, hi] = run.own_rows(e);
        BlockVector* s = run.vec(run.s_a, run.s_b, e);
        const BlockVector* r = run.vec(run.r_a, run.r_b, e);
        run.for_own_rows(e, "xpay_s",
                         {{run.o_r, lo, hi, Access::read},
                          {run.o_s, lo, hi, Access::read_write}},
                         [s, r, beta](std::size_t i) {
                           kernels::xpay_range(*s, *r, beta, i, i + 1);
                         });
      }
      rt.barrier();
      // Both executors need the full direction vector for the next matvec.
      if (run.het) rt.exchange_subvector(run.o_s, run.split, run.step);

      stats.iterations = iter;
      if (cfg.record_trace) stats.trace.push_back({u, alpha, beta});
      if (u <= limit) break;
    }
  }
  stats.converged = u <= limit;

  // Assemble the result on executor A.
  double result_transfer = 0.0;
  if (run.het && run.split > 0) {
    const double t0 = rt.transfer_seconds();
    rt.transfer(run.o_x, 0, run.split, ExecutorId::b, ExecutorId::a,
                TransferKind::result,
                static_cast<std::int64_t>(stats.iterations) + 1);
    result_transfer = rt.transfer_seconds() - t0;
  }

  stats.wall_ms = ms_since(t_start);
  stats.compute_ms =
      stats.wall_ms - (setup_transfer + result_transfer) * 1000.0;

  BlockVector x = run.on_a() ? *run.x_a : *run.x_b;

  // Exit diagnostics on the host's copy of the inputs (not timed).
  BlockVector ax(a.n(), a.block_size());
  kernels::symv_range(a, x, ax, 0, n_rows);
  BlockVector res(a.n(), a.block_size());
  kernels::sub_range(res, rhs, ax, 0, n_rows);
  stats.true_residual = std::sqrt(kernels::dot_range(res, res, 0, n_rows));

  return CgResult{std::move(x), std::move(stats)};
}

}  // namespace hsolve
