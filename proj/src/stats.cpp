#include "conclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conclab {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// continued fraction for the incomplete beta, modified Lentz
double betacf(double a, double b, double x) {
  const int max_iter = 500;
  const double eps = 3e-16, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta parameters must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lnfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(lnfront) * betacf(a, b, x) / a;
  return 1.0 - std::exp(lnfront) * betacf(b, a, 1.0 - x) / b;
}

double inv_reg_inc_beta(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reg_inc_beta(a, b, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double binom_cdf(int64_t k, int64_t n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  // P(X <= k) = I_{1-p}(n-k, k+1)
  return reg_inc_beta(double(n - k), double(k + 1), 1.0 - p);
}

double clopper_pearson_upper(int64_t k, int64_t n, double confidence) {
  if (n <= 0 || k < 0 || k > n) throw std::invalid_argument("bad binomial counts");
  if (k >= n) return 1.0;
  return inv_reg_inc_beta(double(k + 1), double(n - k), confidence);
}

std::pair<int64_t, int64_t> median_ci_order_indices(int64_t n, double confidence) {
  if (n < 1) throw std::invalid_argument("empty sample");
  const double half_alpha = (1.0 - confidence) / 2.0;
  // largest lo with P(Bin(n,1/2) <= lo-1) <= alpha/2
  int64_t lo = 1;
  {
    int64_t a = 1, b = n;
    while (a < b) {
      const int64_t mid = (a + b + 1) / 2;
      if (binom_cdf(mid - 1, n, 0.5) <= half_alpha) a = mid;
      else b = mid - 1;
    }
    lo = (binom_cdf(a - 1, n, 0.5) <= half_alpha) ? a : 1;
  }
  // smallest hi with P(Bin(n,1/2) >= hi) <= alpha/2
  int64_t hi = n;
  {
    int64_t a = 1, b = n;
    while (a < b) {
      const int64_t mid = (a + b) / 2;
      if (1.0 - binom_cdf(mid - 1, n, 0.5) <= half_alpha) b = mid;
      else a = mid + 1;
    }
    hi = a;
  }
  if (lo > hi) { lo = 1; hi = n; }
  return {lo, hi};
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::sort(values.begin(), values.end());
  const size_t idx = (values.size() + 1) / 2;  // ceil(n/2), 1-based
  return values[idx - 1];
}

QuadFit quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  QuadFit f;
  const size_t n = x.size();
  if (n < 3 || y.size() != n) return f;
  // normal equations for [1, x, x^2]
  double s[5] = {0, 0, 0, 0, 0};
  double b[3] = {0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    double xp = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += xp;
      if (k < 3) b[k] += xp * y[i];
      xp *= x[i];
    }
  }
  double m[3][4] = {{s[0], s[1], s[2], b[0]},
                    {s[1], s[2], s[3], b[1]},
                    {s[2], s[3], s[4], b[2]}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-12) return f;
    std::swap(m[col], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double fac = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= fac * m[col][c];
    }
  }
  f.c0 = m[0][3] / m[0][0];
  f.c1 = m[1][3] / m[1][1];
  f.c2 = m[2][3] / m[2][2];
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= double(n);
  double ss_tot = 0.0, ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double pred = f.c0 + f.c1 * x[i] + f.c2 * x[i] * x[i];
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - pred) * (y[i] - pred);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.ok = true;
  return f;
}

}  // namespace conclab
