#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hsolve/blocked_matrix.hpp"

namespace hsolve {

// Squared-exponential kernel with a diagonal noise jitter:
//   K[p][q] = sigma_f2 * exp(-||x_p - x_q||^2 / (2 l^2)) + sigma_n2 * (p == q)
// sigma_n2 > 0 makes the matrix strictly positive definite by construction.
struct KernelParams {
  double sigma_f2 = 1.0;
  double length_scale = 0.0;  // <= 0: median pairwise distance rule
  double sigma_n2 = 1e-2;
  std::size_t dim = 2;
};

// Counter-based PRNG: a pure function of (key, counter), so generation is
// order-independent and reproducible under any parallel schedule.
namespace rng {
std::uint64_t at(std::uint64_t key, std::uint64_t counter);
double uniform01(std::uint64_t key, std::uint64_t counter);   // [0, 1)
double uniform_pm1(std::uint64_t key, std::uint64_t counter); // [-1, 1)
}  // namespace rng

// Deterministic pseudo-random trajectory of n points in dim dimensions,
// row-major: coordinate 0 is the time stamp, the rest are noisy sinusoids.
std::vector<double> generate_inputs(std::size_t n, std::size_t dim,
                                    std::uint64_t seed);

// Median pairwise distance over an up-to-512-point stride subsample; the
// default length-scale rule.
double median_pairwise_distance(const std::vector<double>& points,
                                std::size_t n, std::size_t dim);

// Kernel matrix of a generated trajectory in blocked lower-triangular
// storage with identity padding.
BlockedSPDMatrix generate_spd(std::size_t n, std::size_t b,
                              const KernelParams& params, std::uint64_t seed);

// Deterministic right-hand side with entries in [-1, 1).
BlockVector generate_rhs(std::size_t n, std::size_t b, std::uint64_t seed);

}  // namespace hsolve
