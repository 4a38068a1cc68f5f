#include "hsolve/bench.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hsolve/cg_solver.hpp"
#include "hsolve/cholesky_solver.hpp"
#include "hsolve/errors.hpp"
#include "hsolve/executor.hpp"

namespace hsolve::bench {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

std::string fmt(double v, int precision) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

void fill_ledger(Row& row, const TransferLedger& ledger) {
  row.bytes_total = ledger.total_bytes();
  row.bytes_scalar = ledger.bytes_of(TransferKind::scalar);
  row.bytes_subvector = ledger.bytes_of(TransferKind::subvector);
  row.bytes_block = ledger.bytes_of(TransferKind::block);
  row.bytes_block_row = ledger.bytes_of(TransferKind::block_row);
}

}  // namespace

const char* to_string(Algo algo) {
  return algo == Algo::cg ? "cg" : "cholesky";
}

std::string csv_header() {
  return "algo,n,block_size,fraction,workers_a,workers_b,slowdown_a,"
         "slowdown_b,reps,runtime_ms_median,runtime_ms_mean,compute_ms_median,"
         "iters,recomputes,true_residual,bytes_total,bytes_scalar,"
         "bytes_subvector,bytes_block,bytes_block_row,border_shifts,status,"
         "seed";
}

std::string to_csv(const Row& r) {
  std::ostringstream os;
  os << r.algo << ',' << r.n << ',' << r.block_size << ','
     << fmt(r.fraction, 6) << ',' << r.workers_a << ',' << r.workers_b << ','
     << fmt(r.slowdown_a, 6) << ',' << fmt(r.slowdown_b, 6) << ',' << r.reps
     << ',' << fmt(r.runtime_ms_median, 6) << ',' << fmt(r.runtime_ms_mean, 6)
     << ',' << fmt(r.compute_ms_median, 6) << ',' << r.iters << ','
     << r.recomputes << ',' << fmt(r.true_residual, 17) << ',' << r.bytes_total
     << ',' << r.bytes_scalar << ',' << r.bytes_subvector << ','
     << r.bytes_block << ',' << r.bytes_block_row << ',' << r.border_shifts
     << ',' << r.status << ',' << r.seed;
  return os.str();
}

Row run_single(const RunSpec& spec) {
  SolverConfig cfg = spec.cfg;
  cfg.validate();
  if (spec.matrix == nullptr && spec.n == 0) {
    throw ConfigError("either a matrix or a size is required");
  }
  if (spec.reps == 0) throw ConfigError("repetitions must be >= 1");

  const BlockedSPDMatrix* mat = spec.matrix;
  BlockedSPDMatrix generated(1, 1);
  if (mat == nullptr) {
    generated = generate_spd(spec.n, cfg.block_size, spec.kernel, cfg.seed);
    mat = &generated;
  }
  const std::size_t n = mat->n();
  const std::size_t b = mat->block_size();
  const BlockVector rhs = generate_rhs(n, b, cfg.seed);

  Row row;
  row.algo = to_string(spec.algo);
  row.n = n;
  row.block_size = b;
  row.fraction = cfg.fraction;
  row.workers_a = cfg.workers_a;
  row.workers_b = cfg.workers_b;
  row.slowdown_a = cfg.slowdown_a;
  row.slowdown_b = cfg.slowdown_b;
  row.reps = spec.reps;
  row.seed = cfg.seed;

  std::vector<double> runtimes, computes;
  const std::size_t total_runs = spec.reps + (spec.warmup ? 1 : 0);
  try {
    for (std::size_t rep = 0; rep < total_runs; ++rep) {
      const bool measured = !(spec.warmup && rep == 0);
      Runtime rt(cfg);
      double wall = 0.0, compute = 0.0;
      if (spec.algo == Algo::cg) {
        CgResult result = solve_cg(*mat, rhs, cfg, rt);
        wall = result.stats.wall_ms;
        compute = result.stats.compute_ms;
        row.iters = result.stats.iterations;
        row.recomputes = result.stats.recomputations;
        row.true_residual = result.stats.true_residual;
        row.status = result.stats.converged ? "converged" : "not_converged";
      } else {
        BlockedSPDMatrix work(*mat);
        SpdSolveResult result = solve_spd(work, rhs, cfg, rt);
        wall = result.stats.wall_ms;
        compute = result.stats.compute_ms;
        row.true_residual = result.stats.true_residual;
        row.border_shifts = result.stats.plan.shifts.size();
        row.status = "ok";
      }
      if (measured) {
        runtimes.push_back(wall);
        computes.push_back(compute);
      }
      fill_ledger(row, rt.ledger());
    }
  } catch (const Error& e) {
    row.status = to_string(e.kind());
    return row;
  }
  row.runtime_ms_median = median(runtimes);
  row.runtime_ms_mean = mean(runtimes);
  row.compute_ms_median = median(computes);
  return row;
}

std::vector<Row> run_sweep(const SweepSpec& spec,
                           const std::function<void(const Row&)>& on_row) {
  if (spec.algos.empty() || spec.sizes.empty() || spec.block_sizes.empty() ||
      spec.fractions.empty()) {
    throw ConfigError("sweep grids must be non-empty");
  }
  std::vector<Row> rows;
  // Consecutive rows share (n, b); cache the generated matrix across them.
  BlockedSPDMatrix cached(1, 1);
  std::size_t cached_n = 0, cached_b = 0;
  for (const Algo algo : spec.algos) {
    for (const std::size_t n : spec.sizes) {
      for (const std::size_t b : spec.block_sizes) {
        if (n != cached_n || b != cached_b) {
          cached = generate_spd(n, b, spec.kernel, spec.base.seed);
          cached_n = n;
          cached_b = b;
        }
        for (const double f : spec.fractions) {
          RunSpec rs;
          rs.algo = algo;
          rs.n = n;
          rs.cfg = spec.base;
          rs.cfg.block_size = b;
          rs.cfg.fraction = f;
          rs.kernel = spec.kernel;
          rs.reps = spec.reps;
          rs.warmup = spec.warmup;
          rs.matrix = &cached;
          rows.push_back(run_single(rs));
          if (on_row) on_row(rows.back());
        }
      }
    }
  }
  return rows;
}

std::vector<Summary> summarize(const std::vector<Row>& rows) {
  std::map<std::pair<std::string, std::size_t>, Summary> best;
  for (const Row& r : rows) {
    if (r.status != "ok" && r.status != "converged") continue;
    const auto key = std::make_pair(r.algo, r.n);
    auto it = best.find(key);
    if (it == best.end() || r.runtime_ms_median < it->second.runtime_ms_median) {
      best[key] = Summary{r.algo, r.n, r.fraction, r.runtime_ms_median};
    }
  }
  std::vector<Summary> out;
  out.reserve(best.size());
  for (auto& [key, s] : best) out.push_back(s);
  return out;
}

}  // namespace hsolve::bench
