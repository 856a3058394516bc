#include <doctest.h>

#include <cmath>

#include "iadb/rng.hpp"

using namespace iadb;

TEST_CASE("same seed reproduces the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("labeled sub-streams are stable and independent of new labels") {
  const std::uint64_t root = 7;
  CHECK(derive_seed(root, "alpha") == derive_seed(root, "alpha"));
  CHECK(derive_seed(root, "alpha") != derive_seed(root, "beta"));
  CHECK(derive_seed(root, "alpha", 0) != derive_seed(root, "alpha", 1));
  Rng r(root);
  Rng s1 = r.stream("train-data");
  Rng s2 = r.stream("train-data");
  CHECK(s1.next_u64() == s2.next_u64());
}

TEST_CASE("uniform lies in [0,1) and has the right first moments") {
  Rng rng(123);
  double sum = 0, sum2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal draws have unit variance") {
  Rng rng(99);
  double sum = 0, sum2 = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / n) < 0.015);
  CHECK(std::abs(sum2 / n - 1.0) < 0.03);
}

TEST_CASE("uniform_index stays in range") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_index(7) < 7);
  CHECK_THROWS(rng.uniform_index(0));
}
