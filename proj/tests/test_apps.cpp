#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conclab/apps.hpp"
#include "doctest.h"

using namespace conclab;

namespace {

// subset-DP exact bin packing, independent of the branch-and-bound path
int binpack_dp_oracle(const std::vector<double>& sizes) {
  const int n = int(sizes.size());
  const int full = (1 << n) - 1;
  std::vector<char> fits(size_t(full) + 1, 0);
  for (int mask = 1; mask <= full; ++mask) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) sum += sizes[size_t(i)];
    fits[size_t(mask)] = sum <= 1.0 + 1e-12;
  }
  std::vector<int> dp(size_t(full) + 1, 1 << 20);
  dp[0] = 0;
  for (int mask = 1; mask <= full; ++mask)
    for (int sub = mask; sub; sub = (sub - 1) & mask)
      if (fits[size_t(sub)]) dp[size_t(mask)] = std::min(dp[size_t(mask)],
                                                         dp[size_t(mask ^ sub)] + 1);
  return dp[size_t(full)];
}

// O(N^2) longest non-strict chain
int lis_dp_oracle(const std::vector<double>& xs) {
  const int n = int(xs.size());
  std::vector<int> len(size_t(n), 1);
  int best = n ? 1 : 0;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j)
      if (xs[size_t(j)] <= xs[size_t(i)])
        len[size_t(i)] = std::max(len[size_t(i)], len[size_t(j)] + 1);
    best = std::max(best, len[size_t(i)]);
  }
  return best;
}

// every self-avoiding path on the tiny grid, by depth-first search
double fpp_oracle(int n, const std::vector<double>& w) {
  const int rows = 2 * n + 1;
  const int h_edges = n * rows;
  const int vcount = (n + 1) * rows;
  std::vector<char> seen(size_t(vcount), 0);
  double best = 1e300;
  const int sink = 0 * rows + (n + n);
  std::function<void(int, double)> dfs = [&](int v, double cost) {
    if (cost >= best) return;
    if (v == sink) {
      best = cost;
      return;
    }
    const int x = v / rows, y = v % rows - n;
    seen[size_t(v)] = 1;
    auto go = [&](int nx, int ny, double edge) {
      const int to = nx * rows + (ny + n);
      if (!seen[size_t(to)]) dfs(to, cost + edge);
    };
    if (x < n) go(x + 1, y, w[size_t(x * rows + (y + n))]);
    if (x > 0) go(x - 1, y, w[size_t((x - 1) * rows + (y + n))]);
    if (y < n) go(x, y + 1, w[size_t(h_edges + x * 2 * n + (y + n))]);
    if (y > -n) go(x, y - 1, w[size_t(h_edges + x * 2 * n + (y - 1 + n))]);
    seen[size_t(v)] = 0;
  };
  dfs(0 * rows + n, 0.0);
  return best;
}

}  // namespace

TEST_CASE("bin packing on pinned instances") {
  CHECK(binpack_size({0.6, 0.6, 0.6}, "exact") == 3);
  CHECK(binpack_size({0.6, 0.6, 0.6}, "ffd") == 3);
  CHECK(binpack_size({0.5, 0.5, 0.5, 0.5}, "exact") == 2);
  CHECK(binpack_size({0.5, 0.5, 0.5, 0.5}, "ffd") == 2);
  CHECK_THROWS_AS(binpack_size({1.5}, "exact"), std::invalid_argument);
  CHECK_THROWS_AS(binpack_size({0.5}, "nope"), std::invalid_argument);
  CHECK_THROWS_AS(binpack_exact(std::vector<double>(33, 0.01)), std::invalid_argument);
}

TEST_CASE("branch-and-bound equals the subset DP and respects the 2-sum bound") {
  for (int trial = 0; trial < 200; ++trial) {
    RngStream rng(41, uint64_t(trial));
    const int n = 6 + int(rng.next_index(5));
    std::vector<double> sizes(size_t(n), 0.0);
    double total = 0.0;
    for (auto& s : sizes) {
      s = 0.05 + 0.95 * rng.next_double();
      total += s;
    }
    const int exact = binpack_exact(sizes);
    const int ffd = binpack_ffd(sizes);
    CHECK(exact == binpack_dp_oracle(sizes));
    CHECK(exact <= ffd);
    CHECK(double(ffd) <= 2.0 * total + 1.0);
  }
}

TEST_CASE("longest increasing subsequence on pinned sequences") {
  CHECK(lis_length({1, 2, 3}) == 3);
  CHECK(lis_length({3, 2, 1}) == 1);
  // value frozen from the quadratic DP oracle (non-strict chains)
  CHECK(lis_dp_oracle({3, 1, 4, 1, 5, 9, 2, 6}) == 4);
  CHECK(lis_length({3, 1, 4, 1, 5, 9, 2, 6}) == 4);
  CHECK(lis_length({1, 1, 1}) == 3);
}

TEST_CASE("patience sorting equals the quadratic DP on random input") {
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream rng(43, uint64_t(trial));
    const int n = 1 + int(rng.next_index(200));
    std::vector<double> xs(size_t(n), 0.0);
    // coarse values make ties common
    for (auto& x : xs) x = double(rng.next_index(20));
    CHECK(lis_length(xs) == lis_dp_oracle(xs));
  }
}

TEST_CASE("longest common subsequence") {
  auto word = [](const char* s) {
    std::vector<int> v;
    for (; *s; ++s) v.push_back(*s);
    return v;
  };
  CHECK(lcs_length(word("abc"), word("abc")) == 3);
  CHECK(lcs_length(word("abc"), word("xyz")) == 0);
  CHECK(lcs_length(word("ABCBDAB"), word("BDCABA")) == 4);
  CHECK(lcs_length({}, word("ab")) == 0);
}

TEST_CASE("sup of linear forms statistic") {
  const int n = 4;
  const FamilySpec single =
      FamilySpec::make({std::vector<double>(n, 1.0 / std::sqrt(double(n)))});
  CHECK(supsum_statistic(single, {1, 2, 3, 4}) == doctest::Approx(10.0 / 2.0));
  CHECK(single.sigma == doctest::Approx(1.0));

  std::vector<std::vector<double>> pm;
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(size_t(n), 0.0), m(size_t(n), 0.0);
    e[size_t(j)] = 1.0;
    m[size_t(j)] = -1.0;
    pm.push_back(e);
    pm.push_back(m);
  }
  const FamilySpec linf = FamilySpec::make(pm);
  CHECK(supsum_statistic(linf, {1, -7, 3, 2}) == doctest::Approx(7.0));
  CHECK(linf.tau == doctest::Approx(1.0));

  const FamilySpec two = FamilySpec::make({{1, 0, 0, 0}, {0, 0, 0, 2}});
  CHECK(supsum_statistic(two, {5, 0, 0, 1}) == doctest::Approx(5.0));
  CHECK(supsum_statistic(two, {1, 0, 0, 4}) == doctest::Approx(8.0));
  CHECK(two.sigma == doctest::Approx(2.0));
  CHECK_THROWS_AS(supsum_statistic(two, {1.0}), std::invalid_argument);
}

TEST_CASE("passage time on pinned grids") {
  const int n = 3;
  std::vector<double> unit(size_t(fpp_edge_count(n)), 1.0);
  CHECK(fpp_passage_time(n, unit) == doctest::Approx(3.0));

  // only the straight vertical path is cheap
  std::vector<double> walled(size_t(fpp_edge_count(n)), 1e6);
  const int rows = 2 * n + 1, h_edges = n * rows;
  double expect = 0.0;
  for (int y = 0; y < n; ++y) {
    walled[size_t(h_edges + 0 * 2 * n + (y + n))] = 0.25 * (y + 1);
    expect += 0.25 * (y + 1);
  }
  CHECK(fpp_passage_time(n, walled) == doctest::Approx(expect));
  CHECK_THROWS_AS(fpp_passage_time(n, {1.0}), std::invalid_argument);
  std::vector<double> negative(size_t(fpp_edge_count(n)), -1.0);
  CHECK_THROWS_AS(fpp_passage_time(n, negative), std::invalid_argument);
}

TEST_CASE("dijkstra equals the self-avoiding-path oracle on tiny grids") {
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < (n == 3 ? 20 : 100); ++trial) {
      RngStream rng(47, uint64_t(n * 1000 + trial));
      std::vector<double> w(size_t(fpp_edge_count(n)), 0.0);
      for (auto& v : w) v = rng.next_exponential();
      CHECK(fpp_passage_time(n, w) == doctest::Approx(fpp_oracle(n, w)).epsilon(1e-12));
    }
  }
}

TEST_CASE("spin glass closed form at two sites") {
  SpinGlassConfig cfg;
  cfg.n = 2;
  cfg.beta = 0.7;
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream rng(53, uint64_t(trial));
    const double h = rng.next_normal();
    const double expect = std::log(std::cosh(cfg.beta * h / std::sqrt(2.0)));
    CHECK(spin_glass_logZ(cfg, {h}) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("spin glass degenerate cases and caps") {
  SpinGlassConfig cfg;
  cfg.n = 5;
  cfg.beta = 1e-300;
  std::vector<double> h(10, 1.0);
  CHECK(spin_glass_logZ(cfg, h) == doctest::Approx(0.0).epsilon(1e-9));
  cfg.beta = 0.8;
  std::vector<double> zero(10, 0.0);
  CHECK(spin_glass_logZ(cfg, zero) == doctest::Approx(0.0).epsilon(1e-12));
  SpinGlassConfig big;
  big.n = 25;
  CHECK_THROWS_AS(spin_glass_logZ(big, std::vector<double>(300, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("gray-code enumeration matches the direct sum on small systems") {
  SpinGlassConfig cfg;
  cfg.n = 6;
  cfg.beta = 0.9;
  RngStream rng(59, 0);
  std::vector<double> h(15, 0.0);
  for (auto& v : h) v = rng.next_normal();
  // direct enumeration over all 64 configurations
  double direct = 0.0;
  for (int mask = 0; mask < 64; ++mask) {
    double e = 0.0;
    size_t idx = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j, ++idx) {
        const double si = (mask >> i & 1) ? 1.0 : -1.0;
        const double sj = (mask >> j & 1) ? 1.0 : -1.0;
        e += h[idx] * si * sj;
      }
    direct += std::exp(cfg.beta / std::sqrt(6.0) * e);
  }
  const double expect = std::log(direct / 64.0);
  CHECK(spin_glass_logZ(cfg, h) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("builtin distributions satisfy their moment conditions numerically") {
  for (const char* name : {"exp1", "exp1-trunc", "uniform01"}) {
    const EdgeDist d = EdgeDist::parse(name);
    RngStream rng(61, 0);
    double mean = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) mean += std::exp(d.draw(rng) / d.k0);
    mean /= n;
    CHECK(mean <= 2.02);  // analytic values are 2, <2, and e-1
  }
  CHECK_THROWS_AS(EdgeDist::parse("cauchy"), std::invalid_argument);
  CHECK(ItemDist::parse("uniform01").ex2 == doctest::Approx(1.0 / 3.0));
  CHECK(ItemDist::parse("constant:0.5").ex2 == doctest::Approx(0.25));
  CHECK_THROWS_AS(ItemDist::parse("pareto"), std::invalid_argument);
}

TEST_CASE("degenerate unit items concentrate exactly") {
  const AppReport rep = binpack_experiment(8, ItemDist::parse("constant:1"), 500, 3,
                                           "exact", {1, 2}, 2);
  CHECK(rep.pass);
  CHECK(rep.sections[0].tail.median == doctest::Approx(8.0));
  for (const auto& row : rep.sections[0].tail.rows) CHECK(row.count == 0);
}

TEST_CASE("single-sample-length sequences have zero deviation") {
  const AppReport rep = subsequence_experiment("lis", 1, 0, 0, 1000, 5, {1, 2}, 2);
  CHECK(rep.pass);
  CHECK(rep.sections[0].tail.median == doctest::Approx(1.0));
  for (const auto& sec : rep.sections)
    for (const auto& row : sec.tail.rows) CHECK(row.count == 0);
}

TEST_CASE("app reports regenerate byte-identically") {
  const AppReport a = binpack_experiment(20, ItemDist::parse("uniform01"), 300, 12, "ffd",
                                         {2, 4, 8}, 1);
  const AppReport b = binpack_experiment(20, ItemDist::parse("uniform01"), 300, 12, "ffd",
                                         {2, 4, 8}, 8);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
  const AppReport c = subsequence_experiment("lcs", 40, 40, 2, 200, 9, {2, 4}, 1);
  const AppReport d = subsequence_experiment("lcs", 40, 40, 2, 200, 9, {2, 4}, 8);
  CHECK(c.to_json() == d.to_json());
}

TEST_CASE("permutation-variant preconditions") {
  const FamilySpec fam = FamilySpec::make({{1, 0, 0, 0}, {0, 1, 0, 0}});
  CHECK_THROWS_AS(supsum_perm_experiment(fam, {2, 0, 0, 0}, "13.17", 100, 0, {1}, 1),
                  std::invalid_argument);
  const FamilySpec big = FamilySpec::make({{2, 0, 0, 0}});
  CHECK_THROWS_AS(supsum_perm_experiment(big, {1, 0, 0, 0}, "13.18", 100, 0, {1}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(supsum_perm_experiment(fam, {1, 0, 0, 0}, "13.99", 100, 0, {1}, 1),
                  std::invalid_argument);
}
