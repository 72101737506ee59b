#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conclab/bounds.hpp"
#include "conclab/distances.hpp"
#include "conclab/spaces.hpp"

namespace conclab {

// runs fn(0..n-1) across `workers` threads; each index writes only its own
// output slot, so results never depend on scheduling
void parallel_for(int64_t n, int workers, const std::function<void(int64_t)>& fn);

int default_workers();  // CONCLAB_WORKERS when set, hardware otherwise

// ---------------------------------------------------------------------------
// exact exponential moments

struct Functional {
  enum class Kind { Hamming, OneSided, Penalty, QPoint, ConvexSq, XiPotential };
  Kind kind = Kind::Hamming;
  const WeightProfile* profile = nullptr;  // Hamming
  const PenaltyKernel* kernel = nullptr;   // Penalty
  double alpha = 1.0;                      // XiPotential
  std::vector<const Event*> helpers;       // QPoint components beyond the first
};

// sum over the space of mass(x) * exp(t * f(A,x)) with Kahan compensation;
// f is the squared convex distance for ConvexSq and the xi potential for
// XiPotential (pass t=1 for the plain xi moment)
double exact_exp_moment(const ProductSpace& s, const Event& a, const Functional& f,
                        double t);

// ---------------------------------------------------------------------------
// sweeps

struct SweepRow {
  double pA = 0.0;  // product of component measures for multi-event rows
  double t = 0.0;   // grid value (t, k, or u depending on the equation)
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
};

struct ExactCheckReport {
  std::string equation;
  std::string space;
  std::string note;
  uint64_t seed = 0;
  std::vector<SweepRow> rows;
  std::vector<int64_t> counterexamples;  // row indices with slack < -1e-9*max(1,rhs)

  bool pass() const { return counterexamples.empty(); }
  std::string to_json() const;
  std::string to_csv() const;
};

// how events are produced for a sweep
struct EventSource {
  enum class Kind { All, Random, Explicit } kind = Kind::Random;
  int64_t count = 2000;           // Random
  std::vector<Event> events;      // Explicit
  static EventSource all() { return {Kind::All, 0, {}}; }
  static EventSource random(int64_t n) { return {Kind::Random, n, {}}; }
  static EventSource explicit_list(std::vector<Event> ev) {
    return {Kind::Explicit, 0, std::move(ev)};
  }
};

ExactCheckReport sweep_hamming_moment(const ProductSpace& s, const std::vector<double>& t_grid,
                                      const EventSource& src, uint64_t seed, int workers,
                                      const WeightProfile* profile = nullptr);
ExactCheckReport sweep_hamming_tail(const ProductSpace& s, const std::vector<double>& k_grid,
                                    const EventSource& src, uint64_t seed, int workers,
                                    const WeightProfile* profile = nullptr);
ExactCheckReport sweep_two_point_moment(const ProductSpace& s, double alpha,
                                        const std::vector<double>& t_grid,
                                        const EventSource& src, uint64_t seed, int workers);
ExactCheckReport sweep_one_sided_moment(const ProductSpace& s, double p1,
                                        const EventSource& src, uint64_t seed, int workers);
ExactCheckReport sweep_penalty_moment(const ProductSpace& s, const PenaltyKernel& kernel,
                                      const std::vector<double>& t_grid,
                                      const EventSource& src, uint64_t seed, int workers);
ExactCheckReport sweep_penalty_tail(const ProductSpace& s, const PenaltyKernel& kernel,
                                    const std::vector<double>& u_grid,
                                    const EventSource& src, uint64_t seed, int workers);
// q-point moment with base = q ("3.1.2") or base = a(q,alpha) ("3.2.1");
// draws n_tuples independent q-tuples of events
ExactCheckReport sweep_q_point_moment(const ProductSpace& s, int q, double alpha,
                                      int64_t n_tuples, uint64_t seed, int workers);
// coeff * f_c^2 moment against pA^{-rhs_alpha}: 4.1.2 (coeff 1/4, alpha 1)
// and 4.3.7 (coeff alpha/(alpha+1))
ExactCheckReport sweep_convex_moment(const ProductSpace& s, double coeff, double rhs_alpha,
                                     const EventSource& src, uint64_t seed, int workers,
                                     const std::string& equation);
ExactCheckReport sweep_xi_moment(const ProductSpace& s, double alpha, const EventSource& src,
                                 uint64_t seed, int workers);
// symmetric group: exp(f/16) moment over S_n against 1/P(A)
ExactCheckReport sweep_perm_moment(int n, int64_t n_events, uint64_t seed, int workers);

// dispatcher for the CLI: equation id -> driver
struct SweepOptions {
  std::string space = "uniform2^3";
  std::string events = "all";  // "all" | "random:<n>"
  std::vector<double> t_grid;
  double alpha = 1.0;
  int q = 2;
  double p1 = 0.5;
  double penalty_c = 0.9;
  uint64_t seed = 0;
  int workers = 1;
};
ExactCheckReport run_sweep(const std::string& equation, const SweepOptions& opt);

// ---------------------------------------------------------------------------
// Monte Carlo tails

enum class Deviation {
  Raw,             // value >= u
  AbsFromMedian,   // |value - median| >= u
  AbsFromMedian1,  // |value - median| >= 1 + u
  UpperFromMedian, // value >= median + u
  LowerFromMedian, // value <= median - u
};

struct TailRow {
  double u = 0.0;
  int64_t count = 0;
  int64_t n = 0;
  double point = 0.0;
  double cp_upper = 0.0;  // Clopper-Pearson 99% upper bound
};

struct TailEstimate {
  std::string statistic;
  std::vector<TailRow> rows;
  double median = 0.0;
  double median_lo = 0.0, median_hi = 0.0;  // exact order-statistic 99% CI
  int64_t n = 0;
  uint64_t seed = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

// n draws of `statistic`, one RngStream per trial; exceedances of the chosen
// deviation over the u-grid; deterministic for fixed (seed, grid, n)
TailEstimate mc_tail(const std::string& name,
                     const std::function<double(RngStream&)>& statistic,
                     const std::vector<double>& u_grid, int64_t n, uint64_t seed,
                     int workers, Deviation dev = Deviation::Raw);

// tail estimate from values already drawn (median from the same sample)
TailEstimate tail_from_values(const std::string& name, const std::vector<double>& values,
                              const std::vector<double>& u_grid, uint64_t seed,
                              Deviation dev);

struct BoundCompareRow {
  double u = 0.0;
  double cp_upper = 0.0;
  double bound = 0.0;
  bool vacuous = false;  // bound >= 1; excluded from the verdict
  bool pass = false;
  std::string note;
};

// pass at u iff cp_upper <= bound(u) + 1e-12 or bound >= 1 (vacuous)
std::vector<BoundCompareRow> compare_tail_to_bound(
    const TailEstimate& est, const std::function<BoundValue(double)>& bound);

bool all_rows_pass(const std::vector<BoundCompareRow>& rows);

}  // namespace conclab
