#include "conclab/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "conclab/apps.hpp"
#include "conclab/stats.hpp"
#include "conclab/verify.hpp"

namespace conclab {

namespace {

struct CritOut {
  bool pass = true;
  std::string detail;
  std::string reports;  // newline-joined JSON, compared across worker counts
};

void add_report(CritOut& out, const ExactCheckReport& rep) {
  out.reports += rep.to_json();
  out.reports += '\n';
  if (!rep.pass()) {
    out.pass = false;
    std::ostringstream os;
    os << out.detail << "[" << rep.equation << ": " << rep.counterexamples.size()
       << " counterexamples] ";
    out.detail = os.str();
  }
}

void add_report(CritOut& out, const AppReport& rep, bool count_in_verdict = true) {
  out.reports += rep.to_json();
  out.reports += '\n';
  if (count_in_verdict && !rep.pass) {
    out.pass = false;
    std::ostringstream os;
    os << out.detail << "[" << rep.app << ": dominance fail] ";
    out.detail = os.str();
  }
}

std::string row_summary(const AppReport& rep) {
  std::ostringstream os;
  for (const auto& sec : rep.sections)
    for (const auto& r : sec.rows)
      if (!r.pass)
        os << " " << rep.app << "/" << sec.name << " u=" << r.u << " cp=" << r.cp_upper
           << " bound=" << r.bound << ";";
  return os.str();
}

// ---------------------------------------------------------------------------
// criterion bodies

CritOut c1_hamming(int workers, bool quick) {
  CritOut out;
  const auto t0 = std::chrono::steady_clock::now();
  const ProductSpace cube3 = uniform_space(2, 3);
  add_report(out, sweep_hamming_moment(cube3, {0.25, 0.5, 1.0, 2.0}, EventSource::all(),
                                       101, workers));
  add_report(out, sweep_hamming_tail(cube3, {0.0, 1.0, 2.0, 3.0}, EventSource::all(),
                                     102, workers));
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0).count();
  if (!quick && elapsed > 5.0) {
    out.pass = false;
    out.detail += "[all-events part exceeded the 5 s budget] ";
  }
  const ProductSpace biased = two_point_space(0.3, 4);
  const int64_t events = quick ? 300 : 2000;
  add_report(out, sweep_hamming_moment(biased, {0.25, 0.5, 1.0, 2.0},
                                       EventSource::random(events), 103, workers));
  add_report(out, sweep_hamming_tail(biased, {0.0, 1.0, 2.0, 3.0, 4.0},
                                     EventSource::random(events), 104, workers));
  return out;
}

CritOut c2_two_point(int workers, bool quick) {
  CritOut out;
  const int64_t events = quick ? 300 : 2000;
  uint64_t seed = 201;
  for (double p : {0.3, 0.5})
    for (double alpha : {1.0, 2.0})
      add_report(out, sweep_two_point_moment(two_point_space(p, 4), alpha,
                                             {0.25, 0.5, 1.0},
                                             EventSource::random(events), seed++, workers));
  return out;
}

CritOut c3_one_sided(int workers, bool quick) {
  CritOut out;
  const int64_t events = quick ? 300 : 2000;
  add_report(out, sweep_one_sided_moment(two_point_space(0.3, 3), 0.5, EventSource::all(),
                                         301, workers));
  add_report(out, sweep_one_sided_moment(two_point_space(0.3, 4), 0.5,
                                         EventSource::random(events), 302, workers));
  add_report(out, sweep_one_sided_moment(two_point_space(0.3, 5), 0.5,
                                         EventSource::random(events), 303, workers));
  return out;
}

CritOut c4_penalty(int workers, bool quick) {
  CritOut out;
  (void)quick;
  const ProductSpace s = uniform_space(3, 3);
  // c = 0.9 keeps the exp integral (1 + 2e^c)/3 = 1.973 under 2
  const PenaltyKernel kernel = indicator_kernel(3, s.factors[0], 0.9);
  const double integral = kernel_exp_integral(kernel);
  if (integral > 2.0) {
    out.pass = false;
    out.detail += "[kernel integral above 2] ";
  }
  {
    std::ostringstream os;
    os << "exp-integral=" << integral << " ";
    out.detail += os.str();
  }
  add_report(out, sweep_penalty_moment(s, kernel, {0.5, 1.0}, EventSource::all(), 401,
                                       workers));
  add_report(out, sweep_penalty_tail(s, kernel, {0.5, 0.9, 1.8, 2.7, 4.0, 6.0},
                                     EventSource::all(), 402, workers));
  return out;
}

CritOut c5_q_point(int workers, bool quick) {
  CritOut out;
  const int64_t pairs = quick ? 1000 : 10000;
  const int64_t triples = quick ? 300 : 2000;
  const ProductSpace cube3 = uniform_space(2, 3);
  const ProductSpace tern2 = uniform_space(3, 2);
  add_report(out, sweep_q_point_moment(cube3, 2, 1.0, pairs, 501, workers));
  add_report(out, sweep_q_point_moment(cube3, 2, 2.0, pairs, 502, workers));
  add_report(out, sweep_q_point_moment(tern2, 3, 1.0, triples, 503, workers));
  add_report(out, sweep_q_point_moment(tern2, 3, 2.0, triples, 504, workers));
  return out;
}

CritOut c6_convex(int workers, bool quick) {
  CritOut out;
  const auto t0 = std::chrono::steady_clock::now();
  const int64_t events = quick ? 300 : 2000;
  const ProductSpace cube4 = uniform_space(2, 4);
  add_report(out, sweep_convex_moment(cube4, 0.25, 1.0, EventSource::random(events), 601,
                                      workers, "4.1.2"));
  add_report(out, sweep_xi_moment(cube4, 1.0, EventSource::random(events), 602, workers));
  add_report(out, sweep_xi_moment(cube4, 2.0, EventSource::random(events), 603, workers));
  add_report(out, sweep_convex_moment(cube4, 1.0 / 2.0, 1.0, EventSource::random(events),
                                      604, workers, "4.3.7"));
  add_report(out, sweep_convex_moment(cube4, 2.0 / 3.0, 2.0, EventSource::random(events),
                                      605, workers, "4.3.7"));
  const double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0).count();
  if (!quick && elapsed > 180.0) {
    out.pass = false;
    out.detail += "[exceeded the 3 min budget] ";
  }
  return out;
}

CritOut c7_symmetric_group(int workers, bool quick) {
  CritOut out;
  add_report(out, sweep_perm_moment(4, quick ? 200 : 1000, 701, workers));
  return out;
}

// analytic projection of the origin onto the hull of at most three points
double project_norm2_oracle(const std::vector<std::vector<double>>& pts) {
  const size_t dim = pts[0].size();
  auto norm2 = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };
  double best = norm2(pts[0]);
  for (const auto& p : pts) best = std::min(best, norm2(p));
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double dd = 0.0, ad = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double diff = pts[j][d] - pts[i][d];
        dd += diff * diff;
        ad += pts[i][d] * diff;
      }
      if (dd <= 0.0) continue;
      const double lam = std::min(1.0, std::max(0.0, -ad / dd));
      double v = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double e = pts[i][d] + lam * (pts[j][d] - pts[i][d]);
        v += e * e;
      }
      best = std::min(best, v);
    }
  if (pts.size() == 3) {
    // interior of the triangle via the 2x2 normal equations
    double g11 = 0, g12 = 0, g22 = 0, b1 = 0, b2 = 0;
    for (size_t d = 0; d < dim; ++d) {
      const double e1 = pts[1][d] - pts[0][d];
      const double e2 = pts[2][d] - pts[0][d];
      g11 += e1 * e1;
      g12 += e1 * e2;
      g22 += e2 * e2;
      b1 -= pts[0][d] * e1;
      b2 -= pts[0][d] * e2;
    }
    const double det = g11 * g22 - g12 * g12;
    if (std::fabs(det) > 1e-14) {
      const double c1 = (b1 * g22 - b2 * g12) / det;
      const double c2 = (g11 * b2 - g12 * b1) / det;
      if (c1 >= -1e-12 && c2 >= -1e-12 && c1 + c2 <= 1.0 + 1e-12) {
        double v = 0.0;
        for (size_t d = 0; d < dim; ++d) {
          const double e = pts[0][d] + c1 * (pts[1][d] - pts[0][d]) +
                           c2 * (pts[2][d] - pts[0][d]);
          v += e * e;
        }
        best = std::min(best, v);
      }
    }
  }
  return best;
}

// tuple scan over raw member ranks, no deduplication
long q_point_slow(const ProductSpace& s, const std::vector<const Event*>& as,
                  const PointVec& x) {
  const int n = s.dimension();
  std::vector<size_t> pick(as.size(), 0);
  long best = n + 1;
  PointVec y;
  for (;;) {
    std::vector<bool> covered(size_t(n), false);
    for (size_t j = 0; j < as.size(); ++j) {
      s.point_at_into(as[j]->ranks[pick[j]], y);
      for (int i = 0; i < n; ++i)
        if (x[size_t(i)] == y[size_t(i)]) covered[size_t(i)] = true;
    }
    long miss = 0;
    for (int i = 0; i < n; ++i)
      if (!covered[size_t(i)]) ++miss;
    best = std::min(best, miss);
    size_t j = 0;
    while (j < as.size() && ++pick[j] == as[j]->ranks.size()) pick[j++] = 0;
    if (j == as.size()) break;
  }
  return best;
}

CritOut c8_solver_oracle(int workers, bool quick) {
  CritOut out;
  const int64_t trials = quick ? 200 : 1000;
  std::vector<double> errs(size_t(trials), 0.0);
  parallel_for(trials, workers, [&](int64_t i) {
    RngStream rng(801, uint64_t(i));
    const int n = 1 + int(rng.next_index(6));
    const ProductSpace s = uniform_space(2, n);
    const uint64_t total = s.point_count();
    const int asize = 1 + int(rng.next_index(3));
    std::vector<uint64_t> ranks;
    while (int(ranks.size()) < asize) {
      const uint64_t r = rng.next_index(uint32_t(total));
      bool seen = false;
      for (uint64_t v : ranks) seen |= v == r;
      if (!seen) ranks.push_back(r);
    }
    const Event a = make_event(s, std::move(ranks));
    const PointVec x = s.point_at(rng.next_index(uint32_t(total)));
    const ConvexDistance got = convex_distance(s, a, x);
    std::vector<uint64_t> masks;
    mismatch_atoms(s, a, x, &masks, nullptr);
    std::vector<std::vector<double>> atoms(masks.size(), std::vector<double>(size_t(n)));
    for (size_t m = 0; m < masks.size(); ++m)
      for (int d = 0; d < n; ++d) atoms[m][size_t(d)] = double((masks[m] >> d) & 1u);
    errs[size_t(i)] = std::fabs(got.mnp.value - project_norm2_oracle(atoms));
  });
  double max_err = 0.0;
  for (double e : errs) max_err = std::max(max_err, e);
  if (max_err > 1e-6) {
    out.pass = false;
    out.detail += "[convex solver disagrees with the projection oracle] ";
  }
  {
    std::ostringstream os;
    os << "max|solver-oracle|=" << max_err << " ";
    out.detail += os.str();
  }

  std::vector<int> mismatches(size_t(trials), 0);
  parallel_for(trials, workers, [&](int64_t i) {
    RngStream rng(802, uint64_t(i));
    const bool ternary = rng.next_index(2) == 1;
    const ProductSpace s = ternary ? uniform_space(3, 2) : uniform_space(2, 3);
    const int q = 2 + int(rng.next_index(2));
    std::vector<Event> events;
    for (int j = 0; j < q; ++j) events.push_back(sample_event(s, rng));
    std::vector<const Event*> ptrs;
    for (const auto& e : events) ptrs.push_back(&e);
    const PointVec x = s.point_at(rng.next_index(uint32_t(s.point_count())));
    if (q_point_distance(s, ptrs, x) != q_point_slow(s, ptrs, x)) mismatches[size_t(i)] = 1;
  });
  int bad = 0;
  for (int m : mismatches) bad += m;
  if (bad > 0) {
    out.pass = false;
    std::ostringstream os;
    os << "[q-point disagrees with the tuple scan on " << bad << " instances] ";
    out.detail += os.str();
  }
  out.reports += "{\"check\":\"solver-oracle\"}\n";
  return out;
}

CritOut c9_identities(int workers, bool quick) {
  CritOut out;
  (void)workers;
  (void)quick;
  auto fail = [&](const std::string& what) {
    out.pass = false;
    out.detail += "[" + what + "] ";
  };
  for (int q = 2; q <= 10; ++q) {
    const double x = solve_a_q_alpha(double(q), 1.0);
    const double residual = std::fabs(x + double(q) * 1.0 * std::pow(x, -1.0) - 1.0 - double(q));
    if (residual > 1e-10 * (1.0 + double(q))) fail("a(q,1) residual");
    if (std::fabs(x - double(q)) > 1e-8) fail("a(q,1) != q");
  }
  for (double alpha : {1.0, 2.0, 5.0}) {
    if (std::fabs(xi(alpha, 1.0) - std::log(1.0 + alpha)) > 1e-12) fail("xi(alpha,1)");
    for (int i = 0; i <= 1000; ++i) {
      const double u = double(i) / 1000.0;
      const double lower = alpha * u * u / (2.0 * (alpha + 1.0));
      if (xi(alpha, u) < lower - 1e-12) fail("xi lower parabola");
    }
  }
  for (int i = 0; i <= 300; ++i) {
    const double t = double(i) / 100.0;
    if (std::fabs(two_point_b(1.0, t, 0.5) - a_of_t(t)) > 1e-12) fail("b(1,t,1/2)=a(t)");
  }
  for (int i = 0; i <= 10000; ++i) {
    const double t = double(i) / 1000.0;
    if (a_of_t(t) > std::exp(t * t / 4.0) + 1e-12) fail("a(t) <= exp(t^2/4)");
  }
  out.reports += "{\"check\":\"identities\"}\n";
  return out;
}

CritOut c10_subsequences(int workers, bool quick) {
  CritOut out;
  const auto t0 = std::chrono::steady_clock::now();
  AppReport lis = quick ? subsequence_experiment("lis", 200, 0, 0, 2000, 1001,
                                                 {5, 10, 15, 20}, workers)
                        : subsequence_experiment("lis", 1000, 0, 0, 100000, 1001,
                                                 {10, 20, 30, 40, 50}, workers);
  const double lis_elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - t0).count();
  add_report(out, lis);
  out.detail += row_summary(lis);
  if (!quick && lis_elapsed > 120.0) {
    out.pass = false;
    out.detail += "[lis exceeded the 2 min budget] ";
  }
  AppReport lcs = quick ? subsequence_experiment("lcs", 120, 120, 2, 500, 1002,
                                                 {5, 10, 20, 40}, workers)
                        : subsequence_experiment("lcs", 500, 500, 2, 10000, 1002,
                                                 {10, 20, 40, 80, 160}, workers);
  add_report(out, lcs);
  out.detail += row_summary(lcs);
  return out;
}

CritOut c11_supsum(int workers, bool quick) {
  CritOut out;
  const int n = 100;
  std::vector<std::vector<double>> singleton{std::vector<double>(n, 0.1)};
  const FamilySpec family = FamilySpec::make(singleton);
  const int64_t samples = quick ? 2000 : 100000;
  const std::vector<double> grid = quick ? std::vector<double>{1, 2, 3, 4}
                                         : std::vector<double>{1, 2, 3, 4, 5, 6};
  AppReport base = supsum_experiment(family, {}, samples, 1101, grid, workers);
  add_report(out, base);
  out.detail += row_summary(base);

  // pairs-of-coordinates family for the permutation variants
  std::vector<std::vector<double>> pair_rows;
  for (int j = 0; j < n / 2; ++j) {
    std::vector<double> row(n, 0.0);
    row[size_t(2 * j)] = 1.0;
    row[size_t(2 * j + 1)] = 1.0;
    pair_rows.push_back(row);
    std::vector<double> neg(n, 0.0);
    neg[size_t(2 * j)] = -1.0;
    neg[size_t(2 * j + 1)] = -1.0;
    pair_rows.push_back(neg);
  }
  const FamilySpec pairs = FamilySpec::make(pair_rows);
  std::vector<double> avec(n, 0.0);
  for (int i = 0; i < n / 2; ++i) avec[size_t(i)] = 1.0;
  const int64_t psamples = quick ? 1000 : 10000;
  AppReport p17 = supsum_perm_experiment(pairs, avec, "13.17", psamples, 1102,
                                         {1, 2, 4, 8, 12}, workers);
  add_report(out, p17);
  out.detail += row_summary(p17);
  AppReport p18 = supsum_perm_experiment(pairs, avec, "13.18", psamples, 1103,
                                         {1, 2, 4, 8, 12}, workers);
  add_report(out, p18);
  out.detail += row_summary(p18);

  AppReport qk = supsum_qk_experiment(family, quick ? 2000 : 10000, 1104, 2, {2, 4}, 0.60,
                                      {0.05, 0.1, 0.2, 0.4}, workers);
  add_report(out, qk);
  out.detail += row_summary(qk);
  return out;
}

CritOut c12_binpack(int workers, bool quick) {
  CritOut out;
  const ItemDist dist = ItemDist::parse("uniform01");
  AppReport ffd = quick ? binpack_experiment(60, dist, 1000, 1201, "ffd", {5, 10, 20, 30},
                                             workers)
                        : binpack_experiment(200, dist, 10000, 1201, "ffd",
                                             {5, 10, 20, 40, 60, 80, 100}, workers);
  add_report(out, ffd);
  out.detail += row_summary(ffd);
  AppReport exact = binpack_experiment(12, dist, quick ? 300 : 1000, 1202, "exact",
                                       {2, 4, 8, 16}, workers);
  add_report(out, exact);
  out.detail += row_summary(exact);
  return out;
}

CritOut c13_spin_glass(int workers, bool quick) {
  CritOut out;
  SpinGlassConfig cfg;
  cfg.n = quick ? 12 : 20;
  cfg.beta = 0.5;
  cfg.disorder = "normal";
  const std::vector<double> grid = quick ? std::vector<double>{2, 5, 10, 20}
                                         : std::vector<double>{5, 10, 20, 25, 30, 40};
  AppReport rep = spin_glass_experiment(cfg, quick ? 1000 : 10000, 1301, grid, workers);
  add_report(out, rep);
  out.detail += row_summary(rep);
  {
    std::ostringstream os;
    os << "K_mean=" << rep.aux.at("K_mean_fitted")
       << " K_second=" << rep.aux.at("K_second_fitted") << " ";
    out.detail += os.str();
    if (rep.aux.at("K_mean_fitted") > 20.0) out.detail += "(K_mean above 20, reported) ";
  }
  return out;
}

CritOut c14_fpp(int workers, bool quick) {
  CritOut out;
  const EdgeDist dist = EdgeDist::parse("exp1");
  const int n = quick ? 10 : 20;
  AppReport rep = fpp_experiment(n, dist, quick ? 1000 : 10000, 1401, {1, 2, 4, 8, 16},
                                 4.0 * double(n), workers);
  add_report(out, rep);
  {
    std::ostringstream os;
    os << "K_fitted=" << rep.aux.at("K_fitted");
    if (rep.aux.count("log_tail_quadfit_r2"))
      os << " quadfit_r2=" << rep.aux.at("log_tail_quadfit_r2");
    os << " ";
    out.detail += os.str();
  }
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(bool quick, std::ostream& log,
                                            bool inject_fault) {
  struct Spec {
    int id;
    const char* name;
    std::function<CritOut(int, bool)> fn;
  };
  const std::vector<Spec> specs = {
      {1, "exact sweep, plain mismatch count (2.1.2/2.1.3)", c1_hamming},
      {2, "exact sweep, two-point base (2.3.1)", c2_two_point},
      {3, "exact sweep, dimension-free one-sided (2.3.7)", c3_one_sided},
      {4, "exact sweep, penalty kernel (2.4.4/2.4.13)", c4_penalty},
      {5, "exact sweep, q-point (3.1.2/3.2.1)", c5_q_point},
      {6, "exact sweep, hull distances (4.1.2/4.2.5/4.3.7)", c6_convex},
      {7, "exact sweep, symmetric group (5.2)", c7_symmetric_group},
      {8, "solver oracles (projection + tuple scan)", c8_solver_oracle},
      {9, "bound-function identities", c9_identities},
      {10, "MC dominance, subsequences (7.1.3/7.1.4, 7.2.1/7.2.2)", c10_subsequences},
      {11, "MC dominance, sup of linear forms (8.1.1, 13.17/13.18, 13.4)", c11_supsum},
      {12, "MC dominance, bin packing (6.5)", c12_binpack},
      {13, "MC dominance, spin glass (12.5/12.7/12.8)", c13_spin_glass},
      {14, "first-passage percolation fit (8.3.1)", c14_fpp},
  };

  std::vector<CriterionResult> results;
  bool deterministic = true;
  std::string determinism_detail;
  for (const auto& spec : specs) {
    const auto t0 = std::chrono::steady_clock::now();
    CritOut one = spec.fn(1, quick);
    CritOut eight = spec.fn(8, quick);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0).count();
    if (one.reports != eight.reports) {
      deterministic = false;
      std::ostringstream os;
      os << determinism_detail << "[criterion " << spec.id << " differs across workers] ";
      determinism_detail = os.str();
    }
    CriterionResult r;
    r.id = spec.id;
    r.name = spec.name;
    r.pass = one.pass && eight.pass;
    if (inject_fault && spec.id == 9) {
      r.pass = false;
      one.detail += "[injected fault] ";
    }
    r.detail = one.detail;
    r.seconds = secs;
    log << "criterion " << r.id << (r.pass ? " PASS " : " FAIL ") << "(" << r.name << ", "
        << r.seconds << " s)" << (r.detail.empty() ? "" : " " + r.detail) << "\n";
    log.flush();
    results.push_back(std::move(r));
  }

  CriterionResult det;
  det.id = 15;
  det.name = "determinism: byte-identical reports at 1 and 8 workers";
  det.pass = deterministic;
  det.detail = determinism_detail;
  log << "criterion 15 " << (det.pass ? "PASS " : "FAIL ") << "(" << det.name << ")"
      << (det.detail.empty() ? "" : " " + det.detail) << "\n";
  results.push_back(std::move(det));
  return results;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace conclab
