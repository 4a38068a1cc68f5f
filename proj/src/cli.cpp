#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsolve/bench.hpp"
#include "hsolve/errors.hpp"
#include "hsolve/matrix_io.hpp"

namespace hsolve::bench {
namespace {

struct CommonFlags {
  std::size_t size = 0;
  SolverConfig cfg;
  KernelParams kernel;
  std::size_t reps = 10;
  bool no_warmup = false;
  std::string matrix_path;
  std::string output_path;

  void add_solver_options(CLI::App* cmd) {
    cmd->add_option("--size", size, "Matrix side length for on-the-fly generation");
    cmd->add_option("--block-size", cfg.block_size, "Block side length")
        ->capture_default_str();
    cmd->add_option("--fraction", cfg.fraction,
                    "Share of work on executor B; 0 and 1 run homogeneously")
        ->capture_default_str();
    cmd->add_option("--eps", cfg.eps, "CG termination tolerance")
        ->capture_default_str();
    cmd->add_option("--max-iters", cfg.max_iters, "CG iteration cap")
        ->capture_default_str();
    cmd->add_option("--recompute-interval", cfg.recompute_interval,
                    "Iterations between true-residual recomputations (0 = off)")
        ->capture_default_str();
    cmd->add_option("--workers-a", cfg.workers_a, "Executor A worker threads")
        ->capture_default_str();
    cmd->add_option("--workers-b", cfg.workers_b, "Executor B worker threads")
        ->capture_default_str();
    cmd->add_option("--slowdown-a", cfg.slowdown_a,
                    "Artificial slowdown factor for executor A (>= 1)")
        ->capture_default_str();
    cmd->add_option("--slowdown-b", cfg.slowdown_b,
                    "Artificial slowdown factor for executor B (>= 1)")
        ->capture_default_str();
    cmd->add_option("--reps", reps, "Measured repetitions per configuration")
        ->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Seed for matrix and right-hand side")
        ->capture_default_str();
    cmd->add_option("--matrix", matrix_path, "BSPD1 matrix file to solve");
    cmd->add_option("--output", output_path, "CSV output path (default stdout)");
    cmd->add_flag("--no-warmup", no_warmup,
                  "Skip the unmeasured warmup run (include the cold run)");
    add_kernel_options(cmd);
  }

  void add_kernel_options(CLI::App* cmd) {
    cmd->add_option("--sigma-f2", kernel.sigma_f2, "Kernel signal variance")
        ->capture_default_str();
    cmd->add_option("--sigma-n2", kernel.sigma_n2, "Kernel noise jitter")
        ->capture_default_str();
    cmd->add_option("--length-scale", kernel.length_scale,
                    "Kernel length scale (0 = median-distance rule)")
        ->capture_default_str();
    cmd->add_option("--dim", kernel.dim, "Input point dimension")
        ->capture_default_str();
  }
};

std::vector<double> parse_fraction_grid(const std::string& text) {
  std::vector<double> out;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    // lo:hi:step, inclusive of both ends (within half a step).
    double lo, hi, step;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0.0) {
      throw ConfigError("bad fraction range '" + text + "' (want lo:hi:step)");
    }
    for (int i = 0;; ++i) {
      const double f = lo + step * i;
      if (f > hi + step * 0.5) break;
      out.push_back(std::min(f, hi));
    }
    return out;
  }
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad fraction '" + item + "'");
    }
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<std::size_t>(std::stoull(item)));
    } catch (const std::exception&) {
      throw ConfigError("bad size '" + item + "'");
    }
  }
  return out;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.emplace(path, std::ios::trunc);
      if (!*file_) throw IoError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::optional<std::ofstream> file_;
};

int cmd_gen(const CommonFlags& flags, std::uint64_t seed) {
  if (flags.size == 0) {
    std::cerr << "error: config_error: gen requires --size" << std::endl;
    return 2;
  }
  if (flags.output_path.empty()) {
    std::cerr << "error: config_error: gen requires --output" << std::endl;
    return 2;
  }
  BlockedSPDMatrix m =
      generate_spd(flags.size, flags.cfg.block_size, flags.kernel, seed);
  save_matrix(m, flags.output_path);
  return 0;
}

int cmd_solve(Algo algo, const CommonFlags& flags) {
  RunSpec spec;
  spec.algo = algo;
  spec.cfg = flags.cfg;
  spec.kernel = flags.kernel;
  spec.reps = flags.reps;
  spec.warmup = !flags.no_warmup;
  spec.n = flags.size;

  BlockedSPDMatrix loaded(1, 1);
  if (!flags.matrix_path.empty()) {
    loaded = load_matrix(flags.matrix_path);
    spec.matrix = &loaded;
    spec.cfg.block_size = loaded.block_size();
  } else if (flags.size == 0) {
    std::cerr << "error: config_error: solve needs --matrix or --size"
              << std::endl;
    return 2;
  }

  const Row row = run_single(spec);
  Output out(flags.output_path);
  out.stream() << csv_header() << '\n' << to_csv(row) << '\n';
  const bool ok = row.status == "converged" || row.status == "ok";
  if (!ok) std::cerr << "error: " << row.status << std::endl;
  return ok ? 0 : 1;
}

int cmd_sweep(const CommonFlags& flags, const std::string& fractions_text,
              const std::string& sizes_text, const std::string& blocks_text,
              bool summary) {
  SweepSpec spec;
  spec.algos = {Algo::cg, Algo::cholesky};
  spec.fractions = parse_fraction_grid(fractions_text);
  spec.sizes = sizes_text.empty() ? std::vector<std::size_t>{flags.size}
                                  : parse_size_list(sizes_text);
  spec.block_sizes = blocks_text.empty()
                         ? std::vector<std::size_t>{flags.cfg.block_size}
                         : parse_size_list(blocks_text);
  if (!sizes_text.empty() && spec.sizes.empty()) {
    throw ConfigError("empty size list");
  }
  if (spec.sizes.size() == 1 && spec.sizes[0] == 0) {
    throw ConfigError("sweep needs --sizes or --size");
  }
  spec.base = flags.cfg;
  spec.kernel = flags.kernel;
  spec.reps = flags.reps;
  spec.warmup = !flags.no_warmup;

  Output out(flags.output_path);
  out.stream() << csv_header() << '\n';
  const std::vector<Row> rows = run_sweep(
      spec, [&](const Row& r) { out.stream() << to_csv(r) << '\n'; });
  bool all_ok = true;
  for (const Row& r : rows) {
    all_ok = all_ok && (r.status == "ok" || r.status == "converged");
  }
  if (summary) {
    for (const Summary& s : summarize(rows)) {
      out.stream() << "# argmin algo=" << s.algo << " n=" << s.n
                   << " fraction=" << s.argmin_fraction
                   << " runtime_ms_median=" << s.runtime_ms_median << '\n';
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Blocked SPD solvers on a two-executor runtime"};
  app.require_subcommand(1);
  // Config file keys live under a [gen]/[solve]/[sweep] section; the flag is
  // accepted before or after the subcommand name.
  app.set_config("--config", "", "Config file (key=value; flags override)");

  CommonFlags gen_flags, solve_flags, sweep_flags;

  CLI::App* gen = app.add_subcommand("gen", "Generate a BSPD1 matrix file");
  gen->fallthrough();
  gen->add_option("--size", gen_flags.size, "Matrix side length")->required();
  gen->add_option("--block-size", gen_flags.cfg.block_size, "Block side length")
      ->capture_default_str();
  gen->add_option("--seed", gen_flags.cfg.seed, "Generator seed")
      ->capture_default_str();
  gen->add_option("--output", gen_flags.output_path, "Output path")->required();
  gen_flags.add_kernel_options(gen);

  std::string algo_name;
  CLI::App* solve = app.add_subcommand("solve", "Solve one configuration");
  solve->fallthrough();
  solve->add_option("algo", algo_name, "Solver: cg or cholesky")
      ->required()
      ->check(CLI::IsMember({"cg", "cholesky"}));
  solve_flags.add_solver_options(solve);

  std::string fractions_text = "0.0";
  std::string sizes_text, blocks_text;
  bool summary = false;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Sweep fractions/sizes/block sizes for both solvers");
  sweep->fallthrough();
  sweep_flags.add_solver_options(sweep);
  sweep->add_option("--fractions", fractions_text,
                    "Fraction grid: lo:hi:step or comma list")
      ->capture_default_str();
  sweep->add_option("--sizes", sizes_text, "Comma list of matrix sizes");
  sweep->add_option("--block-sizes", blocks_text, "Comma list of block sizes");
  sweep->add_flag("--summary", summary,
                  "Append argmin fraction per (algo, size)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags, gen_flags.cfg.seed);
    if (solve->parsed()) {
      return cmd_solve(algo_name == "cg" ? Algo::cg : Algo::cholesky,
                       solve_flags);
    }
    return cmd_sweep(sweep_flags, fractions_text, sizes_text, blocks_text,
                     summary);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what()
              << std::endl;
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what()
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

}  // namespace hsolve::bench
