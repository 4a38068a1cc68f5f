#include "hsolve/genmat.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "hsolve/errors.hpp"

namespace hsolve {

namespace rng {

namespace {
// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t at(std::uint64_t key, std::uint64_t counter) {
  return mix(key ^ mix(counter));
}

double uniform01(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(at(key, counter) >> 11) * 0x1.0p-53;
}

double uniform_pm1(std::uint64_t key, std::uint64_t counter) {
  return 2.0 * uniform01(key, counter) - 1.0;
}

}  // namespace rng

namespace {

constexpr std::uint64_t kPointsStream = 0x706f696e74730001ull;
constexpr std::uint64_t kRhsStream = 0x7268730000000001ull;
constexpr double kTimeStep = 0.01;
constexpr double kNoiseAmplitude = 0.05;

double point_coord(std::uint64_t seed, std::size_t i, std::size_t k,
                   std::size_t dim) {
  const double t = static_cast<double>(i) * kTimeStep;
  if (k == 0) return t;
  const double omega = 1.0 + 0.5 * static_cast<double>(k - 1);
  const double noise = kNoiseAmplitude *
                       rng::uniform_pm1(seed ^ kPointsStream,
                                        static_cast<std::uint64_t>(i) * dim + k);
  return std::sin(omega * t) + noise;
}

// Splits [0, count) across a few threads; fn must be pure per index.
void parallel_indices(std::size_t count,
                      const std::function<void(std::size_t)>& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, 16);
  if (workers <= 1 || count < 2 * workers) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([=, &fn] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

std::vector<double> generate_inputs(std::size_t n, std::size_t dim,
                                    std::uint64_t seed) {
  if (n == 0 || dim == 0) {
    throw ConfigError("point count and dimension must be positive");
  }
  std::vector<double> points(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      points[i * dim + k] = point_coord(seed, i, k, dim);
    }
  }
  return points;
}

double median_pairwise_distance(const std::vector<double>& points,
                                std::size_t n, std::size_t dim) {
  const std::size_t m = std::min<std::size_t>(n, 512);
  if (m < 2) return 1.0;
  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t pi = i * n / m;
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::size_t pj = j * n / m;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = points[pi * dim + k] - points[pj * dim + k];
        d2 += d * d;
      }
      dists.push_back(std::sqrt(d2));
    }
  }
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid == 0.0 ? 1.0 : *mid;
}

BlockedSPDMatrix generate_spd(std::size_t n, std::size_t b,
                              const KernelParams& params, std::uint64_t seed) {
  if (!(params.sigma_f2 > 0.0) || !(params.sigma_n2 > 0.0)) {
    throw ConfigError("kernel variances must be positive");
  }
  const std::vector<double> points = generate_inputs(n, params.dim, seed);
  const double ell = params.length_scale > 0.0
                         ? params.length_scale
                         : median_pairwise_distance(points, n, params.dim);
  const double inv2l2 = 1.0 / (2.0 * ell * ell);
  const std::size_t dim = params.dim;

  BlockedSPDMatrix mat(n, b);
  const std::size_t rows = mat.block_rows();
  parallel_indices(rows, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double* blk = mat.block(i, j);
      for (std::size_t r = 0; r < b; ++r) {
        const std::size_t p = i * b + r;
        for (std::size_t c = 0; c < b; ++c) {
          const std::size_t q = j * b + c;
          double v;
          if (p >= n || q >= n) {
            v = (p == q) ? 1.0 : 0.0;  // identity padding
          } else if (p == q) {
            v = params.sigma_f2 + params.sigma_n2;
          } else {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
              const double d = points[p * dim + k] - points[q * dim + k];
              d2 += d * d;
            }
            v = params.sigma_f2 * std::exp(-d2 * inv2l2);
          }
          blk[r * b + c] = v;
        }
      }
    }
  });
  return mat;
}

BlockVector generate_rhs(std::size_t n, std::size_t b, std::uint64_t seed) {
  BlockVector v(n, b);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = rng::uniform_pm1(seed ^ kRhsStream, i);
  }
  return v;
}

}  // namespace hsolve
