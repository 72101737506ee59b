#include <cmath>
#include <vector>

#include "conclab/stats.hpp"
#include "doctest.h"

using namespace conclab;

namespace {

// direct binomial sum, good to machine precision for small n
double binom_cdf_direct(int64_t k, int64_t n, double p) {
  double cdf = 0.0;
  for (int64_t j = 0; j <= k; ++j) {
    double logpmf = std::lgamma(double(n + 1)) - std::lgamma(double(j + 1)) -
                    std::lgamma(double(n - j + 1)) + j * std::log(p) +
                    (n - j) * std::log1p(-p);
    cdf += std::exp(logpmf);
  }
  return cdf;
}

}  // namespace

TEST_CASE("incomplete beta obeys the reflection identity") {
  for (double a : {0.5, 1.0, 3.0, 10.0})
    for (double b : {0.5, 2.0, 7.0})
      for (double x : {0.05, 0.3, 0.5, 0.9})
        CHECK(reg_inc_beta(a, b, x) ==
              doctest::Approx(1.0 - reg_inc_beta(b, a, 1.0 - x)).epsilon(1e-12));
}

TEST_CASE("binomial cdf agrees with the direct sum") {
  for (int64_t n : {5, 20, 60})
    for (int64_t k = 0; k <= n; k += 3)
      for (double p : {0.2, 0.5, 0.77})
        CHECK(binom_cdf(k, n, p) == doctest::Approx(binom_cdf_direct(k, n, p)).epsilon(1e-10));
}

TEST_CASE("inverse incomplete beta inverts") {
  for (double a : {1.0, 4.0, 11.0})
    for (double b : {2.0, 9.0})
      for (double p : {0.01, 0.5, 0.99}) {
        const double x = inv_reg_inc_beta(a, b, p);
        CHECK(reg_inc_beta(a, b, x) == doctest::Approx(p).epsilon(1e-9));
      }
}

TEST_CASE("zero-count upper bound matches the closed form") {
  for (int64_t n : {100, 10000, 100000})
    CHECK(clopper_pearson_upper(0, n, 0.99) ==
          doctest::Approx(1.0 - std::pow(0.01, 1.0 / double(n))).epsilon(1e-10));
  CHECK(clopper_pearson_upper(7, 7, 0.99) == doctest::Approx(1.0));
}

TEST_CASE("upper bound covers the point estimate and grows with k") {
  const int64_t n = 500;
  double prev = 0.0;
  for (int64_t k = 0; k <= n; k += 25) {
    const double up = clopper_pearson_upper(k, n, 0.99);
    CHECK(up >= double(k) / double(n));
    CHECK(up >= prev);
    prev = up;
  }
}

TEST_CASE("median order-statistic indices carry the right tail mass") {
  for (int64_t n : {11, 100, 999, 10000}) {
    const auto [lo, hi] = median_ci_order_indices(n, 0.99);
    CHECK(lo >= 1);
    CHECK(hi <= n);
    CHECK(lo < hi);
    CHECK(binom_cdf(lo - 1, n, 0.5) <= 0.005);
    CHECK(1.0 - binom_cdf(hi - 1, n, 0.5) <= 0.005);
    // maximal lo, minimal hi
    CHECK(binom_cdf(lo, n, 0.5) > 0.005);
    CHECK(1.0 - binom_cdf(hi - 2, n, 0.5) > 0.005);
  }
}

TEST_CASE("lower median of an even sample") {
  CHECK(lower_median({4, 1, 3, 2}) == doctest::Approx(2.0));
  CHECK(lower_median({5, 1, 3}) == doctest::Approx(3.0));
}

TEST_CASE("quadratic fit recovers an exact quadratic") {
  std::vector<double> x, y;
  for (int i = 0; i < 8; ++i) {
    x.push_back(double(i));
    y.push_back(2.0 - 0.5 * i + 0.25 * i * i);
  }
  const QuadFit f = quadratic_fit(x, y);
  REQUIRE(f.ok);
  CHECK(f.c0 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(f.c1 == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(f.c2 == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}
