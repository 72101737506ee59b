#include <cstdint>
#include <vector>

#include "conclab/rng.hpp"
#include "doctest.h"

using namespace conclab;

TEST_CASE("identical (seed, stream) pairs replay identically") {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams from one seed diverge") {
  RngStream a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("doubles live in [0,1)") {
  RngStream r(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("next_index is unbiased enough for a fair coin") {
  RngStream r(42, 0);
  int64_t ones = 0;
  const int64_t n = 1000000;
  for (int64_t i = 0; i < n; ++i) ones += r.next_index(2);
  const double freq = double(ones) / double(n);
  CHECK(freq > 0.498);
  CHECK(freq < 0.502);
}

TEST_CASE("normal draws have roughly unit variance") {
  RngStream r(3, 0);
  double sum = 0.0, sum2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = r.next_normal();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}
