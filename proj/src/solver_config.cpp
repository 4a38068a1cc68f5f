#include "hsolve/solver_config.hpp"

#include <string>

#include "hsolve/errors.hpp"

namespace hsolve {

void SolverConfig::validate() const {
  if (!(eps > 0.0)) {
    throw ConfigError("eps must be positive, got " + std::to_string(eps));
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("fraction must be in [0, 1], got " +
                      std::to_string(fraction));
  }
  if (block_size == 0) {
    throw ConfigError("block size must be positive");
  }
  if (workers_a == 0 || workers_b == 0) {
    throw ConfigError("both executors need at least one worker");
  }
  if (!(slowdown_a >= 1.0) || !(slowdown_b >= 1.0)) {
    throw ConfigError("slowdown factors must be >= 1.0");
  }
}

}  // namespace hsolve
