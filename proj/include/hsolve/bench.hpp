#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hsolve/blocked_matrix.hpp"
#include "hsolve/genmat.hpp"
#include "hsolve/solver_config.hpp"

namespace hsolve::bench {

enum class Algo { cg, cholesky };
const char* to_string(Algo algo);

struct RunSpec {
  Algo algo = Algo::cg;
  std::size_t n = 0;
  SolverConfig cfg;
  KernelParams kernel;
  std::size_t reps = 10;
  bool warmup = true;  // one extra unmeasured run first
  const BlockedSPDMatrix* matrix = nullptr;  // overrides on-the-fly generation
};

// One CSV row. Non-timing columns are bit-identical across repeated
// invocations with the same seed and flags; the timing columns are medians
// and means over the measured repetitions.
struct Row {
  std::string algo;
  std::size_t n = 0;
  std::size_t block_size = 0;
  double fraction = 0.0;
  std::size_t workers_a = 0, workers_b = 0;
  double slowdown_a = 1.0, slowdown_b = 1.0;
  std::size_t reps = 0;
  double runtime_ms_median = 0.0;
  double runtime_ms_mean = 0.0;
  double compute_ms_median = 0.0;
  std::size_t iters = 0;
  std::size_t recomputes = 0;
  double true_residual = 0.0;
  std::uint64_t bytes_total = 0;
  std::uint64_t bytes_scalar = 0;
  std::uint64_t bytes_subvector = 0;
  std::uint64_t bytes_block = 0;
  std::uint64_t bytes_block_row = 0;
  std::size_t border_shifts = 0;
  std::string status;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string to_csv(const Row& row);

// Runs one configuration. Solver failures are reported through Row::status
// (the machine-readable error kind); configuration mistakes throw.
Row run_single(const RunSpec& spec);

struct SweepSpec {
  std::vector<Algo> algos;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> block_sizes;
  std::vector<double> fractions;
  SolverConfig base;  // fraction and block_size are taken from the grids
  KernelParams kernel;
  std::size_t reps = 10;
  bool warmup = true;
};

// Cross product in deterministic order: algo, size, block size, fraction.
// Per-row failures are recorded in the status column and the sweep continues.
std::vector<Row> run_sweep(const SweepSpec& spec,
                           const std::function<void(const Row&)>& on_row = {});

struct Summary {
  std::string algo;
  std::size_t n = 0;
  double argmin_fraction = 0.0;
  double runtime_ms_median = 0.0;
};

// Argmin fraction per (algo, size), over rows with an ok/converged status.
std::vector<Summary> summarize(const std::vector<Row>& rows);

// Full command-line interface (gen / solve / sweep); returns the process
// exit code: 0 ok, 1 numerical or file failure, 2 usage.
int cli_main(int argc, const char* const* argv);

}  // namespace hsolve::bench
