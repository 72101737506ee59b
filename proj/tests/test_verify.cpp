#include <cmath>
#include <stdexcept>

#include "conclab/stats.hpp"
#include "conclab/verify.hpp"
#include "doctest.h"

using namespace conclab;

TEST_CASE("exponential moment of the whole space is one") {
  const ProductSpace s = uniform_space(2, 3);
  std::vector<uint64_t> all;
  for (uint64_t r = 0; r < 8; ++r) all.push_back(r);
  const Event whole = make_event(s, all);
  for (double t : {0.25, 1.0, 3.0}) {
    Functional hamming;
    CHECK(exact_exp_moment(s, whole, hamming, t) == doctest::Approx(1.0).epsilon(1e-12));
    Functional convex;
    convex.kind = Functional::Kind::ConvexSq;
    CHECK(exact_exp_moment(s, whole, convex, t) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("corner-event moments match hand enumeration") {
  const ProductSpace s = uniform_space(2, 3);
  const Event corner = make_event_points(s, {{0, 0, 0}});
  Functional hamming;
  const double lhs = exact_exp_moment(s, corner, hamming, std::log(2.0));
  CHECK(lhs == doctest::Approx(27.0 / 8.0).epsilon(1e-12));
  BoundQuery q;
  q.N = 3;
  q.pA = corner.measure;
  q.t = std::log(2.0);
  const double rhs = hamming_moment(q).value;
  CHECK(rhs == doctest::Approx(8.0 * std::pow(1.125, 3.0)).epsilon(1e-12));
  CHECK(lhs <= rhs);

  Functional convex;
  convex.kind = Functional::Kind::ConvexSq;
  const double expect = (1.0 + 3.0 * std::exp(0.25) + 3.0 * std::exp(0.5) +
                         std::exp(0.75)) / 8.0;
  CHECK(exact_exp_moment(s, corner, convex, 0.25) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect <= 8.0);
}

TEST_CASE("moments are normalized at t=0 and nondecreasing in t") {
  const ProductSpace s = uniform_space(2, 3);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream rng(7, uint64_t(trial));
    const Event a = sample_event(s, rng);
    Functional f;
    CHECK(exact_exp_moment(s, a, f, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 0.0;
    for (double t : {0.0, 0.5, 1.0, 2.0}) {
      const double v = exact_exp_moment(s, a, f, t);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("small sweeps have no counterexamples") {
  const ProductSpace cube = uniform_space(2, 3);
  const ExactCheckReport moment =
      sweep_hamming_moment(cube, {0.25, 0.5, 1.0, 2.0}, EventSource::all(), 0, 2);
  CHECK(moment.rows.size() == 255 * 4);
  CHECK(moment.pass());

  const ExactCheckReport one_sided =
      sweep_one_sided_moment(two_point_space(0.3, 3), 0.5, EventSource::all(), 0, 2);
  CHECK(one_sided.pass());

  const ExactCheckReport qpt = sweep_q_point_moment(cube, 2, 1.0, 100, 1, 2);
  CHECK(qpt.pass());
}

TEST_CASE("sweep reports serialize and flag synthetic counterexamples") {
  const ProductSpace cube = uniform_space(2, 2);
  ExactCheckReport rep =
      sweep_hamming_moment(cube, {0.5}, EventSource::all(), 3, 1);
  CHECK(rep.to_json().find("\"verdict\":\"pass\"") != std::string::npos);
  CHECK(rep.to_csv().rfind("equation,row", 0) == 0);
  rep.rows[0].lhs = rep.rows[0].rhs + 1.0;  // corrupt one row
  rep.counterexamples.clear();
  ExactCheckReport again = rep;
  again.counterexamples.clear();
  for (int64_t i = 0; i < int64_t(again.rows.size()); ++i) {
    auto& r = again.rows[size_t(i)];
    r.slack = r.rhs - r.lhs;
    if (r.slack < -1e-9 * std::max(1.0, r.rhs)) again.counterexamples.push_back(i);
  }
  CHECK_FALSE(again.pass());
}

TEST_CASE("monte carlo tails of a constant statistic are exact") {
  const double c = 3.25;
  const TailEstimate est = mc_tail(
      "const", [&](RngStream&) { return c; }, {c - 1.0, c + 1.0}, 2000, 9, 2);
  CHECK(est.rows[0].point == doctest::Approx(1.0));
  CHECK(est.rows[1].point == doctest::Approx(0.0));
  CHECK(est.median == doctest::Approx(c));
}

TEST_CASE("uniform exceedance estimate lands near one half") {
  const TailEstimate est = mc_tail(
      "u01", [](RngStream& r) { return r.next_double(); }, {0.5}, 100000, 4, 2);
  CHECK(std::fabs(est.rows[0].point - 0.5) < 0.005);
  CHECK(est.rows[0].cp_upper >= est.rows[0].point);
}

TEST_CASE("tail estimates are identical across worker counts") {
  auto stat = [](RngStream& r) { return r.next_normal(); };
  const TailEstimate one = mc_tail("n", stat, {0.0, 1.0, 2.0}, 5000, 11, 1);
  const TailEstimate eight = mc_tail("n", stat, {0.0, 1.0, 2.0}, 5000, 11, 8);
  CHECK(one.to_json() == eight.to_json());
}

TEST_CASE("bound comparison verdicts") {
  TailEstimate est;
  est.statistic = "synthetic";
  est.n = 100000;
  est.rows = {{1.0, 0, 100000, 0.0, clopper_pearson_upper(0, 100000, 0.99)},
              {2.0, 10000, 100000, 0.1, clopper_pearson_upper(10000, 100000, 0.99)}};

  const auto vacuous = compare_tail_to_bound(est, [](double) {
    BoundValue b;
    b.value = 1.5;
    return b;
  });
  CHECK(vacuous[0].vacuous);
  CHECK(vacuous[0].pass);
  CHECK(all_rows_pass(vacuous));

  const auto mixed = compare_tail_to_bound(est, [](double u) {
    BoundValue b;
    b.value = u < 1.5 ? 6e-5 : 1e-9;  // tight pass at u=1, synthetic violation at u=2
    return b;
  });
  CHECK(mixed[0].pass);
  CHECK_FALSE(mixed[1].pass);
  CHECK_FALSE(all_rows_pass(mixed));
}

TEST_CASE("mc estimates cover an exact expectation at the stated rate") {
  // exceedance of 0.5 under uniform(0,1) has exact probability 1/2; the
  // two-sided 99% interval should cover it in at least 97 of 100 replicas
  int covered = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const TailEstimate est = mc_tail(
        "u01", [](RngStream& r) { return r.next_double(); }, {0.5}, 1000,
        uint64_t(1000 + rep), 2);
    const int64_t k = est.rows[0].count;
    const int64_t n = est.rows[0].n;
    const double lo = k == 0 ? 0.0 : inv_reg_inc_beta(double(k), double(n - k + 1), 0.005);
    const double hi = k == n ? 1.0 : inv_reg_inc_beta(double(k + 1), double(n - k), 0.995);
    if (lo <= 0.5 && 0.5 <= hi) ++covered;
  }
  CHECK(covered >= 97);
}

TEST_CASE("the sweep dispatcher runs from option structs") {
  SweepOptions opt;
  opt.space = "uniform2^3";
  opt.events = "all";
  opt.t_grid = {0.5};
  opt.workers = 2;
  CHECK(run_sweep("2.1.2", opt).pass());
  opt.events = "random:50";
  CHECK(run_sweep("4.1.2", opt).pass());
  opt.space = "S4";
  opt.events = "random:20";
  CHECK(run_sweep("5.2", opt).pass());
  CHECK_THROWS_AS(run_sweep("1.2.3", opt), std::invalid_argument);
}
