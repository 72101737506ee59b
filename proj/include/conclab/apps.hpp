#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "conclab/verify.hpp"

namespace conclab {

// one tail estimate compared against one bound curve
struct AppSection {
  std::string name;
  TailEstimate tail;
  std::vector<BoundCompareRow> rows;
};

struct AppReport {
  std::string app;
  std::map<std::string, std::string> params;  // stringified, key-sorted
  std::vector<AppSection> sections;
  std::map<std::string, double> aux;  // means, fitted constants, fit quality
  std::string note;
  uint64_t seed = 0;
  bool pass = true;

  std::string to_json() const;
  std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// bin packing

// first-fit-decreasing bin count
int binpack_ffd(const std::vector<double>& sizes);
// exact optimum by branch and bound; sizes in (0,1], at most 32 items
int binpack_exact(const std::vector<double>& sizes);
int binpack_size(const std::vector<double>& sizes, const std::string& mode);

// item distributions: "uniform01" (E X^2 = 1/3), "constant:<c>" (E X^2 = c^2)
struct ItemDist {
  std::string name;
  double ex2 = 1.0 / 3.0;
  static ItemDist parse(const std::string& text);
  double draw(RngStream& rng) const;

 private:
  double constant_ = 1.0;
};

AppReport binpack_experiment(int n, const ItemDist& dist, int64_t samples, uint64_t seed,
                             const std::string& mode, const std::vector<double>& u_grid,
                             int workers);

// ---------------------------------------------------------------------------
// subsequences

// longest non-strict increasing subsequence, patience style, O(N log N)
int lis_length(const std::vector<double>& xs);
// classic DP
int lcs_length(const std::vector<int>& a, const std::vector<int>& b);

// kind "lis": iid uniform coordinates; kind "lcs": two words over a finite
// alphabet; both tails (above/below the estimated median) are compared
AppReport subsequence_experiment(const std::string& kind, int n, int n2, int alphabet,
                                 int64_t samples, uint64_t seed,
                                 const std::vector<double>& u_grid, int workers);

// ---------------------------------------------------------------------------
// supremum of linear forms

struct FamilySpec {
  std::vector<std::vector<double>> alphas;
  double sigma = 0.0;  // sup of euclidean norms
  double tau = 0.0;    // sup of coordinate magnitudes
  static FamilySpec make(std::vector<std::vector<double>> alphas);
};

double supsum_statistic(const FamilySpec& family, const std::vector<double>& x);

// Z = sup over the family of <alpha, r + U> with U_i uniform on [0,1);
// |Z - M| tails against 4 exp(-u^2 / 4 sigma^2)
AppReport supsum_experiment(const FamilySpec& family, const std::vector<double>& ranges,
                            int64_t samples, uint64_t seed,
                            const std::vector<double>& u_grid, int workers);

// Z(rho) = sup over the family of sum_i alpha_i a_{rho(i)} for a uniform
// permutation rho; variant "13.17" needs |a_i| <= 1, "13.18" needs
// max_i sup |alpha_i| <= 1
AppReport supsum_perm_experiment(const FamilySpec& family, const std::vector<double>& avec,
                                 const std::string& variant, int64_t samples, uint64_t seed,
                                 const std::vector<double>& u_grid, int workers);

// two-sided estimate of P(Z >= qa+t) <= 1/(q^{k+1} P(Z<=a)^q) + P(tau*top-k >= t)
// with a at the given sample quantile
AppReport supsum_qk_experiment(const FamilySpec& family, int64_t samples, uint64_t seed,
                               int q, const std::vector<int>& k_list, double a_quantile,
                               const std::vector<double>& t_grid, int workers);

// ---------------------------------------------------------------------------
// first-passage percolation

// grid [0,n] x [-n,n]; source (0,0), sink (0,n); horizontal edges first in
// row-major order, then vertical
int fpp_edge_count(int n);
double fpp_passage_time(int n, const std::vector<double>& edge_weights);

// edge-weight distributions with E exp(X/K0) <= 2:
//   "exp1"       Exp(1), K0 = 2 (E e^{X/2} = 2)
//   "exp1-trunc" min(Exp(1), 5), K0 = 2
//   "uniform01"  uniform on [0,1), K0 = 1 (E e^X = e-1)
struct EdgeDist {
  std::string name;
  double k0 = 2.0;
  static EdgeDist parse(const std::string& text);
  double draw(RngStream& rng) const;
};

// fitted-K report: K is the smallest value making every non-vacuous row
// pass; qualitative log-tail diagnostics go to aux
AppReport fpp_experiment(int n, const EdgeDist& dist, int64_t samples, uint64_t seed,
                         const std::vector<double>& u_grid, double r_scale, int workers);

// ---------------------------------------------------------------------------
// spin glass

struct SpinGlassConfig {
  int n = 20;                      // sites, <= 24
  double beta = 0.5;               // in (0,1]
  std::string disorder = "normal"; // normal | rademacher | uniform
};

// exact log of the partition function for one disorder draw; couplings are
// the N(N-1)/2 values h_ij in lexicographic (i<j) order
double spin_glass_logZ(const SpinGlassConfig& cfg, const std::vector<double>& couplings);

AppReport spin_glass_experiment(const SpinGlassConfig& cfg, int64_t samples, uint64_t seed,
                                const std::vector<double>& t_grid, int workers);

}  // namespace conclab
