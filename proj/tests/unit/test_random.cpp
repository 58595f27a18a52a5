#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "infodemic/random.hpp"

using namespace infodemic;

TEST_CASE("engine follows the standard mt19937_64 sequence") {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.next_u64();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("mix64 matches splitmix64's first output from state 0") {
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
}

TEST_CASE("derived seeds depend on key and seed") {
  CHECK(derive_seed(42, "a") == derive_seed(42, "a"));
  CHECK(derive_seed(42, "a") != derive_seed(42, "b"));
  CHECK(derive_seed(42, "a") != derive_seed(43, "a"));
}

TEST_CASE("uniform01 stays in [0, 1)") {
  Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("uniform_index is unbiased over a small range") {
  Rng rng(3);
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(6)];
  for (int c : counts) CHECK(std::abs(c - n / 6) < 400);
}

TEST_CASE("normal has unit moments") {
  Rng rng(9);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  Rng r1(11), r2(11);
  r1.shuffle(std::span<int>(a));
  r2.shuffle(std::span<int>(b));
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(50);
  std::iota(expect.begin(), expect.end(), 0);
  CHECK(sorted == expect);
  CHECK(a != expect);
}
