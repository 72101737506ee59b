#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conclab/apps.hpp"

namespace conclab {

int lis_length(const std::vector<double>& xs) {
  // pile tops; upper_bound keeps chains non-strict
  std::vector<double> tops;
  for (double x : xs) {
    auto it = std::upper_bound(tops.begin(), tops.end(), x);
    if (it == tops.end()) tops.push_back(x);
    else *it = x;
  }
  return int(tops.size());
}

int lcs_length(const std::vector<int>& a, const std::vector<int>& b) {
  const size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return 0;
  std::vector<uint16_t> prev(m + 1, 0), cur(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    const int ai = a[i - 1];
    for (size_t j = 1; j <= m; ++j) {
      const uint16_t diag = uint16_t(prev[j - 1] + (ai == b[j - 1] ? 1 : 0));
      cur[j] = std::max({diag, prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

AppReport subsequence_experiment(const std::string& kind, int n, int n2, int alphabet,
                                 int64_t samples, uint64_t seed,
                                 const std::vector<double>& u_grid, int workers) {
  const bool lis = kind == "lis";
  if (!lis && kind != "lcs") throw std::invalid_argument("kind must be lis or lcs");
  AppReport rep;
  rep.app = kind;
  rep.seed = seed;
  rep.params["N"] = std::to_string(n);
  if (!lis) {
    rep.params["N2"] = std::to_string(n2);
    rep.params["alphabet"] = std::to_string(alphabet);
  }
  rep.params["samples"] = std::to_string(samples);

  std::function<double(RngStream&)> stat;
  if (lis) {
    stat = [n](RngStream& rng) {
      std::vector<double> xs(size_t(n), 0.0);
      for (auto& x : xs) x = rng.next_double();
      return double(lis_length(xs));
    };
  } else {
    stat = [n, n2, alphabet](RngStream& rng) {
      std::vector<int> a(size_t(n), 0), b(size_t(n2), 0);
      for (auto& v : a) v = int(rng.next_index(uint32_t(alphabet)));
      for (auto& v : b) v = int(rng.next_index(uint32_t(alphabet)));
      return double(lcs_length(a, b));
    };
  }

  // the raw values feed both one-sided tails
  std::vector<double> values(size_t(samples), 0.0);
  parallel_for(samples, workers, [&](int64_t i) {
    RngStream rng(seed, uint64_t(i));
    values[size_t(i)] = stat(rng);
  });
  const double c = lis ? 4.0 : 32.0;

  TailEstimate upper =
      tail_from_values(kind + "-upper", values, u_grid, seed, Deviation::UpperFromMedian);
  const double med = upper.median;
  AppSection sec_up;
  sec_up.name = "above-median";
  sec_up.rows = compare_tail_to_bound(upper, [&](double u) {
    BoundValue b;
    b.equation = lis ? "7.1.3" : "7.2.1";
    b.value = 2.0 * std::exp(-u * u / (c * (med + u)));
    return b;
  });
  sec_up.tail = std::move(upper);

  TailEstimate lower =
      tail_from_values(kind + "-lower", values, u_grid, seed, Deviation::LowerFromMedian);
  AppSection sec_lo;
  sec_lo.name = "below-median";
  sec_lo.rows = compare_tail_to_bound(lower, [&](double u) {
    BoundValue b;
    b.equation = lis ? "7.1.4" : "7.2.2";
    b.value = 2.0 * std::exp(-u * u / (c * med));
    return b;
  });
  sec_lo.tail = std::move(lower);

  rep.aux["median"] = med;
  rep.pass = all_rows_pass(sec_up.rows) && all_rows_pass(sec_lo.rows);
  rep.sections.push_back(std::move(sec_up));
  rep.sections.push_back(std::move(sec_lo));
  return rep;
}

}  // namespace conclab
