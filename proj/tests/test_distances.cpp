#include <cmath>
#include <stdexcept>

#include "conclab/distances.hpp"
#include "doctest.h"

using namespace conclab;

namespace {

Event random_event(const ProductSpace& s, RngStream& rng) {
  const uint64_t total = s.point_count();
  std::vector<uint64_t> ranks;
  for (;;) {
    for (uint64_t r = 0; r < total; ++r)
      if (rng.next_index(3) == 0) ranks.push_back(r);
    if (!ranks.empty()) return make_event(s, std::move(ranks));
  }
}

// independent projection oracle for hulls of at most three 0/1 atoms
double tiny_hull_norm2(const std::vector<std::vector<double>>& pts) {
  auto norm2_at = [&](double l0, double l1, double l2) {
    double v = 0.0;
    for (size_t d = 0; d < pts[0].size(); ++d) {
      double e = l0 * pts[0][d];
      if (pts.size() > 1) e += l1 * pts[1][d];
      if (pts.size() > 2) e += l2 * pts[2][d];
      v += e * e;
    }
    return v;
  };
  // dense barycentric grid plus local refinement; plenty for 1e-6 agreement
  const int g = 200;
  double best = 1e300;
  double b0 = 1, b1 = 0;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j + i <= g; ++j) {
      const double l1 = pts.size() > 1 ? double(i) / g : 0.0;
      const double l2 = pts.size() > 2 ? double(j) / g : 0.0;
      if (pts.size() == 2 && j > 0) continue;
      if (pts.size() == 1 && (i > 0 || j > 0)) continue;
      const double v = norm2_at(1.0 - l1 - l2, l1, l2);
      if (v < best) {
        best = v;
        b0 = l1;
        b1 = l2;
      }
    }
  const double step0 = 1.5 / g;
  for (double step = step0; step > 1e-9; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& [d1, d2] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step},
                                   {0.0, -step}, {step, -step}, {-step, step}}) {
        const double n1 = b0 + d1, n2 = b1 + d2;
        if (n1 < 0 || n2 < 0 || n1 + n2 > 1) continue;
        if (pts.size() < 3 && n2 > 0) continue;
        if (pts.size() < 2 && n1 > 0) continue;
        const double v = norm2_at(1.0 - n1 - n2, n1, n2);
        if (v < best - 1e-18) {
          best = v;
          b0 = n1;
          b1 = n2;
          moved = true;
        }
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("mismatch-count distance on points and profiles") {
  const ProductSpace s = uniform_space(2, 3);
  const PointVec x{1, 0, 1};
  CHECK(hamming_distance(s, make_event_points(s, {x}), x) == doctest::Approx(0.0));
  const Event corner = make_event_points(s, {{0, 0, 0}});
  CHECK(hamming_distance(s, corner, x) == doctest::Approx(2.0));
  const WeightProfile w = make_profile({5, 1, 1});
  CHECK(hamming_distance(s, corner, x, &w) == doctest::Approx(6.0));
  CHECK_THROWS_AS(make_profile({0, 0}), std::invalid_argument);
}

TEST_CASE("distance vanishes exactly on the event and shrinks with inclusion") {
  const ProductSpace s = uniform_space(2, 4);
  for (int trial = 0; trial < 50; ++trial) {
    RngStream rng(11, uint64_t(trial));
    const Event a = random_event(s, rng);
    Event bigger = a;
    std::vector<uint64_t> extra = a.ranks;
    extra.push_back(rng.next_index(16));
    bigger = make_event(s, extra);
    for (uint64_t r = 0; r < 16; ++r) {
      const PointVec x = s.point_at(r);
      const double d = hamming_distance(s, a, x);
      CHECK((d == 0.0) == a.contains(r));
      CHECK(hamming_distance(s, bigger, x) <= d);
    }
  }
}

TEST_CASE("one-sided distance counts only 1->0 mismatches") {
  const ProductSpace s = uniform_space(2, 3);
  const Event any = make_event_points(s, {{0, 1, 1}});
  CHECK(one_sided_distance(s, any, {0, 0, 0}) == 0);
  CHECK(one_sided_distance(s, make_event_points(s, {{0, 0, 0}}), {1, 1, 0}) == 2);
  CHECK(one_sided_distance(s, any, {1, 1, 0}) == 1);
  const ProductSpace t = uniform_space(3, 2);
  CHECK_THROWS_AS(one_sided_distance(t, make_event_points(t, {{0, 0}}), {1, 1}),
                  std::invalid_argument);
}

TEST_CASE("penalty distance generalizes the mismatch count") {
  const ProductSpace s = uniform_space(3, 2);
  std::vector<double> absdiff = {0, 1, 2, 1, 0, 1, 2, 1, 0};
  const PenaltyKernel k = make_kernel(3, absdiff, s.factors[0]);
  const Event origin = make_event_points(s, {{0, 0}});
  CHECK(penalty_distance(s, origin, {2, 1}, k) == doctest::Approx(3.0));
  CHECK(penalty_distance(s, origin, {0, 0}, k) == doctest::Approx(0.0));

  const ProductSpace cube = uniform_space(2, 4);
  const PenaltyKernel ind = indicator_kernel(2, cube.factors[0]);
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream rng(17, uint64_t(trial));
    const Event a = random_event(cube, rng);
    const PointVec x = cube.point_at(rng.next_index(16));
    CHECK(penalty_distance(cube, a, x, ind) == hamming_distance(cube, a, x));
  }
}

TEST_CASE("q-point distance on the stated examples") {
  const ProductSpace s = uniform_space(2, 2);
  const Event zeros = make_event_points(s, {{0, 0}});
  const Event mixed = make_event_points(s, {{0, 1}, {1, 0}});
  const PointVec ones{1, 1};
  CHECK(q_point_distance(s, {&zeros, &mixed}, {0, 0}) == 0);
  CHECK(q_point_distance(s, {&zeros, &zeros}, ones) == 2);
  CHECK(q_point_distance(s, {&mixed, &mixed}, ones) == 0);
  CHECK_THROWS_AS(q_point_distance(s, {&zeros}, ones), std::invalid_argument);
  CHECK_THROWS_WITH_AS(q_point_distance(s, {&mixed, &mixed}, ones, 3),
                       doctest::Contains("tuple budget exceeded"), std::runtime_error);
}

TEST_CASE("more helper sets never increase the q-point distance") {
  const ProductSpace s = uniform_space(2, 4);
  for (int trial = 0; trial < 200; ++trial) {
    RngStream rng(19, uint64_t(trial));
    const Event a = random_event(s, rng);
    const PointVec x = s.point_at(rng.next_index(16));
    const double h = hamming_distance(s, a, x);
    for (size_t q = 2; q <= 4; ++q) {
      std::vector<const Event*> same(q, &a);
      CHECK(double(q_point_distance(s, same, x)) <= h);
    }
  }
}

TEST_CASE("minimum-norm point on tiny hulls") {
  const MinNormResult single = min_norm_point({{1, 1}}, MinNormObjective::SquaredEuclidean);
  CHECK(single.value == doctest::Approx(2.0));
  CHECK(single.point[0] == doctest::Approx(1.0));

  const MinNormResult seg =
      min_norm_point({{0, 1}, {1, 0}}, MinNormObjective::SquaredEuclidean);
  CHECK(seg.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(seg.point[0] == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(seg.point[1] == doctest::Approx(0.5).epsilon(1e-7));

  const MinNormResult tri =
      min_norm_point({{0, 1}, {1, 0}, {1, 1}}, MinNormObjective::SquaredEuclidean);
  CHECK(tri.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(tri.point[0] == doctest::Approx(0.5).epsilon(1e-7));

  // support weights reconstruct the optimizer
  double w0 = 0.0, w1 = 0.0;
  for (const auto& [idx, w] : seg.support) {
    CHECK(w >= 0.0);
    if (idx == 0) w0 = w;
    if (idx == 1) w1 = w;
  }
  CHECK(w0 + w1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w1 * 1.0 == doctest::Approx(seg.point[0]).epsilon(1e-9));
}

TEST_CASE("hull distance on the stated examples") {
  const ProductSpace s = uniform_space(2, 2);
  const PointVec ones{1, 1};
  CHECK(convex_distance(s, make_event_points(s, {{1, 1}}), ones).fc ==
        doctest::Approx(0.0));
  CHECK(convex_distance(s, make_event_points(s, {{0, 0}}), ones).fc ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(convex_distance(s, make_event_points(s, {{0, 0}, {1, 1}}), {0, 1}).fc ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("squared hull distance never exceeds the mismatch count") {
  const ProductSpace s = uniform_space(2, 4);
  for (int trial = 0; trial < 300; ++trial) {
    RngStream rng(23, uint64_t(trial));
    const Event a = random_event(s, rng);
    const PointVec x = s.point_at(rng.next_index(16));
    const ConvexDistance c = convex_distance(s, a, x);
    CHECK(c.mnp.value <= hamming_distance(s, a, x) + 1e-9);
    CHECK(c.mnp.gap <= 1e-9);
    CHECK(c.dual_min >= c.mnp.value - c.mnp.gap - 1e-7);
  }
}

TEST_CASE("hull solver agrees with the projection oracle on tiny events") {
  for (int trial = 0; trial < 1000; ++trial) {
    RngStream rng(29, uint64_t(trial));
    const int n = 1 + int(rng.next_index(6));
    const ProductSpace s = uniform_space(2, n);
    const uint64_t total = s.point_count();
    std::vector<uint64_t> ranks;
    const int size = 1 + int(rng.next_index(3));
    while (int(ranks.size()) < size) {
      const uint64_t r = rng.next_index(uint32_t(total));
      bool dup = false;
      for (uint64_t v : ranks) dup |= v == r;
      if (!dup) ranks.push_back(r);
    }
    const Event a = make_event(s, std::move(ranks));
    const PointVec x = s.point_at(rng.next_index(uint32_t(total)));
    std::vector<uint64_t> masks;
    mismatch_atoms(s, a, x, &masks, nullptr);
    std::vector<std::vector<double>> atoms(masks.size(), std::vector<double>(size_t(n), 0));
    for (size_t m = 0; m < masks.size(); ++m)
      for (int d = 0; d < n; ++d) atoms[m][size_t(d)] = double((masks[m] >> d) & 1u);
    const double got = convex_distance(s, a, x).mnp.value;
    CHECK(got == doctest::Approx(tiny_hull_norm2(atoms)).epsilon(2e-6));
  }
}

TEST_CASE("xi-potential distance") {
  const ProductSpace s = uniform_space(2, 2);
  const PointVec ones{1, 1};
  CHECK(xi_distance(s, make_event_points(s, {{1, 1}}), ones, 1.0).value ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(xi_distance(s, make_event_points(s, {{0, 0}}), ones, 1.0).value ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-6));

  const ProductSpace cube = uniform_space(2, 4);
  for (double alpha : {1.0, 2.0})
    for (int trial = 0; trial < 100; ++trial) {
      RngStream rng(31, uint64_t(trial));
      const Event a = random_event(cube, rng);
      const PointVec x = cube.point_at(rng.next_index(16));
      const double fa = xi_distance(cube, a, x, alpha).value;
      const double fc2 = convex_distance(cube, a, x).mnp.value;
      CHECK(fa >= alpha / (2.0 * (alpha + 1.0)) * fc2 - 1e-6);
    }
}

TEST_CASE("permutation hull distance") {
  const Permutation id{0, 1, 2};
  const Permutation swapped{1, 0, 2};
  CHECK(perm_convex_distance({swapped}, swapped).value == doctest::Approx(0.0));
  CHECK(perm_convex_distance({id}, swapped).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(perm_convex_distance({{1, 0, 2}, {0, 2, 1}}, {1, 2, 0}).value ==
        doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS_AS(perm_convex_distance({{0, 1}}, {0, 1, 2}), std::invalid_argument);
}
