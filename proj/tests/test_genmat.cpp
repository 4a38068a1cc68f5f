#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "hsolve/cg_solver.hpp"
#include "hsolve/cholesky_solver.hpp"
#include "hsolve/errors.hpp"
#include "hsolve/genmat.hpp"
#include "hsolve/matrix_io.hpp"

using namespace hsolve;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("/tmp/hsolve_test_") + name;
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<char>((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
}

void spit(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("generate_inputs determinism") {
  const auto a = generate_inputs(100, 2, 42);
  const auto b = generate_inputs(100, 2, 42);
  CHECK(a == b);

  const auto c = generate_inputs(100, 2, 43);
  CHECK(a != c);
  CHECK(a[0] == c[0]);  // time stamp coordinate is seed-independent
  CHECK(a[1] != c[1]);

  const auto single = generate_inputs(1, 3, 7);
  CHECK(single.size() == 3);
}

TEST_CASE("kernel matrix structure") {
  KernelParams params;
  const BlockedSPDMatrix m = generate_spd(50, 8, params, 11);
  for (std::size_t p = 0; p < 50; p += 7) {
    CHECK(m.element(p, p) == params.sigma_f2 + params.sigma_n2);
  }
  for (std::size_t p = 0; p < 50; p += 5) {
    for (std::size_t q = 0; q < 50; q += 3) {
      CHECK(m.element(p, q) == m.element(q, p));
      if (p != q) {
        CHECK(m.element(p, q) > 0.0);
        CHECK(m.element(p, q) <= params.sigma_f2);
      }
    }
  }
}

TEST_CASE("generated matrices are positive definite") {
  BlockedSPDMatrix m = generate_spd(256, 32, KernelParams{}, 42);
  SolverConfig cfg;
  cfg.block_size = 32;
  Runtime rt(cfg);
  CHECK_NOTHROW(factorize(m, cfg, rt));
}

TEST_CASE("median distance rule is deterministic and positive") {
  const auto points = generate_inputs(300, 2, 5);
  const double m1 = median_pairwise_distance(points, 300, 2);
  const double m2 = median_pairwise_distance(points, 300, 2);
  CHECK(m1 == m2);
  CHECK(m1 > 0.0);
}

TEST_CASE("CG converges on a generated system within the regression bound") {
  const std::size_t n = 1024, b = 32;
  const BlockedSPDMatrix m = generate_spd(n, b, KernelParams{}, 42);
  const BlockVector rhs = generate_rhs(n, b, 42);
  SolverConfig cfg;
  cfg.block_size = b;
  cfg.eps = 1e-6;
  cfg.max_iters = 500;
  cfg.workers_a = 4;
  Runtime rt(cfg);
  const CgResult result = solve_cg(m, rhs, cfg, rt);
  CHECK(result.stats.converged);
  CHECK(result.stats.iterations <= 500);
}

TEST_CASE("BSPD1 round trip is bit-identical") {
  std::mt19937_64 seeds(1234);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 16 + seeds() % 60;
    const std::size_t b = 1 + seeds() % 12;
    BlockedSPDMatrix m = generate_spd(n, b, KernelParams{}, seeds());
    const std::string path = temp_path("roundtrip.bspd");
    save_matrix(m, path);
    const BlockedSPDMatrix back = load_matrix(path);
    REQUIRE(back.n() == m.n());
    REQUIRE(back.block_size() == m.block_size());
    CHECK(std::memcmp(back.data(), m.data(),
                      m.value_count() * sizeof(double)) == 0);
    std::remove(path.c_str());
  }
}

TEST_CASE("BSPD1 error kinds are distinct") {
  const std::string path = temp_path("format.bspd");
  BlockedSPDMatrix m = generate_spd(20, 4, KernelParams{}, 3);
  save_matrix(m, path);
  const std::vector<char> good = slurp(path);

  SUBCASE("wrong magic") {
    std::vector<char> bad = good;
    bad[0] = 'X';
    spit(path, bad);
    CHECK_THROWS_AS(load_matrix(path), FormatError);
  }
  SUBCASE("version mismatch") {
    std::vector<char> bad = good;
    bad[4] = 0x02;
    spit(path, bad);
    CHECK_THROWS_AS(load_matrix(path), VersionMismatchError);
  }
  SUBCASE("truncated block region reports expected and actual sizes") {
    std::vector<char> bad = good;
    bad.resize(bad.size() - 100);
    spit(path, bad);
    try {
      load_matrix(path);
      FAIL("expected TruncatedFileError");
    } catch (const TruncatedFileError& e) {
      CHECK(e.expected_bytes() == good.size());
      CHECK(e.actual_bytes() == good.size() - 100);
    }
  }
  SUBCASE("truncated header") {
    std::vector<char> bad = good;
    bad.resize(10);
    spit(path, bad);
    CHECK_THROWS_AS(load_matrix(path), TruncatedFileError);
  }
  SUBCASE("implausible header") {
    std::vector<char> bad = good;
    for (int i = 0; i < 8; ++i) bad[5 + i] = static_cast<char>(0xFF);
    spit(path, bad);
    CHECK_THROWS_AS(load_matrix(path), FormatError);
  }
  std::remove(path.c_str());
}

TEST_CASE("missing file is an io error") {
  CHECK_THROWS_AS(load_matrix("/tmp/hsolve_does_not_exist.bspd"), IoError);
}

TEST_CASE("vector file round trip") {
  BlockVector v = generate_rhs(33, 8, 9);
  const std::string path = temp_path("vec.bin");
  save_vector(v, path);
  const BlockVector back = load_vector(path, 8);
  REQUIRE(back.n() == v.n());
  CHECK(std::memcmp(back.data(), v.data(),
                    v.padded_n() * sizeof(double)) == 0);
  std::remove(path.c_str());
}
