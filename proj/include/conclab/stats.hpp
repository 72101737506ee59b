#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace conclab {

// regularized incomplete beta I_x(a,b)
double reg_inc_beta(double a, double b, double x);
// inverse of I_x(a,b) in x
double inv_reg_inc_beta(double a, double b, double p);

// P(Binomial(n,p) <= k)
double binom_cdf(int64_t k, int64_t n, double p);

// exact (Clopper-Pearson) one-sided upper confidence bound for a binomial
// proportion with k successes out of n
double clopper_pearson_upper(int64_t k, int64_t n, double confidence = 0.99);

// 1-based order-statistic indices (lo, hi) of an exact two-sided confidence
// interval for the median of an i.i.d. sample of size n
std::pair<int64_t, int64_t> median_ci_order_indices(int64_t n, double confidence = 0.99);

// lower median of a sample: order statistic ceil(n/2) (1-based) of the
// sorted values
double lower_median(std::vector<double> values);

// least-squares fit of y = c0 + c1 x + c2 x^2; returns {c0,c1,c2,R^2}
struct QuadFit {
  double c0 = 0, c1 = 0, c2 = 0, r2 = 0;
  bool ok = false;
};
QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace conclab
