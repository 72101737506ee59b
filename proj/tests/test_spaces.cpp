#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "conclab/io.hpp"
#include "conclab/spaces.hpp"
#include "doctest.h"

using namespace conclab;

TEST_CASE("uniform cube has eight points of mass 1/8") {
  const ProductSpace s = uniform_space(2, 3);
  CHECK(s.point_count() == 8);
  double total = 0.0;
  for_each_point(s, [&](uint64_t, const PointVec&, double m) {
    CHECK(m == doctest::Approx(0.125));
    total += m;
  });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed product of given weights") {
  const ProductSpace s = make_space({{0.3, 0.7}, {0.5, 0.5}});
  std::vector<double> masses;
  for_each_point(s, [&](uint64_t, const PointVec&, double m) { masses.push_back(m); });
  std::sort(masses.begin(), masses.end());
  CHECK(masses[0] == doctest::Approx(0.15));
  CHECK(masses[1] == doctest::Approx(0.15));
  CHECK(masses[2] == doctest::Approx(0.35));
  CHECK(masses[3] == doctest::Approx(0.35));
}

TEST_CASE("degenerate one-symbol product") {
  const ProductSpace s = make_space({{1.0}, {1.0}, {1.0}, {1.0}, {1.0}});
  CHECK(s.point_count() == 1);
  CHECK(s.mass_at(0) == doctest::Approx(1.0));
}

TEST_CASE("construction rejects bad input") {
  CHECK_THROWS_AS(make_space({}), std::invalid_argument);
  CHECK_THROWS_AS(make_space({{0.5, -0.5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_space({{0.6, 0.5}}), std::invalid_argument);
  // within 1e-9 renormalizes instead
  const ProductSpace ok = make_space({{0.5 + 4e-10, 0.5}});
  CHECK(ok.factors[0].weights[0] + ok.factors[0].weights[1] == doctest::Approx(1.0));
}

TEST_CASE("measure of simple events") {
  const ProductSpace cube = uniform_space(2, 3);
  const Event corner = make_event_points(cube, {{0, 0, 0}});
  CHECK(corner.measure == doctest::Approx(1.0 / 8).epsilon(1e-12));

  const ProductSpace biased = two_point_space(0.3, 2);
  const Event ones = make_event_points(biased, {{1, 1}});
  CHECK(ones.measure == doctest::Approx(0.09).epsilon(1e-12));

  std::vector<uint64_t> all;
  for (uint64_t r = 0; r < 8; ++r) all.push_back(r);
  CHECK(make_event(cube, all).measure == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration order is mixed-radix, last coordinate fastest") {
  const ProductSpace s = uniform_space(2, 2);
  std::vector<PointVec> pts;
  for_each_point(s, [&](uint64_t, const PointVec& x, double) { pts.push_back(x); });
  CHECK(pts == std::vector<PointVec>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

  const ProductSpace t = uniform_space(3, 1);
  std::vector<PointVec> ts;
  for_each_point(t, [&](uint64_t, const PointVec& x, double) { ts.push_back(x); });
  CHECK(ts == std::vector<PointVec>{{0}, {1}, {2}});
}

TEST_CASE("enumeration cap is enforced with a named count") {
  const ProductSpace big = uniform_space(2, 25);
  CHECK_FALSE(big.enumerable());
  CHECK_THROWS_WITH_AS(big.point_count(), doctest::Contains("too large to enumerate"),
                       std::runtime_error);
  CHECK(big.enumerable(uint64_t(1) << 25));
}

TEST_CASE("masses sum to one on random spaces") {
  for (int trial = 0; trial < 50; ++trial) {
    RngStream rng(99, uint64_t(trial));
    const int n = 1 + int(rng.next_index(4));
    std::vector<std::vector<double>> ws;
    for (int i = 0; i < n; ++i) {
      const int k = 1 + int(rng.next_index(4));
      std::vector<double> w(size_t(k), 0.0);
      double sum = 0.0;
      for (auto& v : w) {
        v = 0.05 + rng.next_double();
        sum += v;
      }
      for (auto& v : w) v /= sum;
      ws.push_back(std::move(w));
    }
    const ProductSpace s = make_space(ws);
    double total = 0.0;
    for_each_point(s, [&](uint64_t, const PointVec&, double m) { total += m; });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("measure is additive over random partitions") {
  const ProductSpace s = uniform_space(2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng(123, uint64_t(trial));
    std::vector<uint64_t> left, right;
    for (uint64_t r = 0; r < 16; ++r)
      (rng.next_index(2) ? left : right).push_back(r);
    if (left.empty() || right.empty()) continue;
    const double sum = make_event(s, left).measure + make_event(s, right).measure;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sampling is reproducible and respects degenerate spaces") {
  const ProductSpace one = make_space({{1.0}, {1.0}});
  RngStream rng(5, 0);
  CHECK(sample_point(one, rng) == PointVec{0, 0});

  const ProductSpace s = uniform_space(2, 8);
  RngStream a(42, 0), b(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_point(s, a) == sample_point(s, b));
}

TEST_CASE("coin frequency matches the binomial interval") {
  const ProductSpace coin = uniform_space(2, 1);
  RngStream rng(42, 1);
  int64_t ones = 0;
  const int64_t n = 1000000;
  for (int64_t i = 0; i < n; ++i) ones += sample_point(coin, rng)[0];
  const double freq = double(ones) / double(n);
  CHECK(freq > 0.498);
  CHECK(freq < 0.502);
}

TEST_CASE("builtin predicates") {
  const ProductSpace s = uniform_space(2, 3);
  CHECK(event_from_predicate(s, "sum-le-k", 1).size() == 4);
  CHECK(event_from_predicate(s, "sum-ge-k", 2).size() == 4);
  const PointVec p{1, 0, 1};
  const Event single = event_from_predicate(s, "singleton", 0, &p);
  CHECK(single.size() == 1);
  CHECK(single.contains(s.rank_of(p)));
  CHECK_THROWS_AS(event_from_predicate(s, "nope", 0), std::invalid_argument);
}

TEST_CASE("space and event JSON round out the external interface") {
  const ProductSpace s = space_from_json_text(R"({"factors": [[0.5,0.5],[0.5,0.5]]})");
  CHECK(s.point_count() == 4);
  const Event e = event_from_json_text(s, R"({"points": [[0,0],[1,1]]})");
  CHECK(e.measure == doctest::Approx(0.5));
  const Event p = event_from_json_text(s, R"({"predicate": "sum-le-k", "k": 0})");
  CHECK(p.size() == 1);
}

TEST_CASE("events reject out-of-range members") {
  const ProductSpace s = uniform_space(2, 2);
  CHECK_THROWS_AS(make_event(s, {4}), std::out_of_range);
  CHECK_THROWS_AS(make_event_points(s, {{0, 2}}), std::out_of_range);
}
