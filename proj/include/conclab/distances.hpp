#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "conclab/penalty_kernel.hpp"
#include "conclab/spaces.hpp"

namespace conclab {

// per-coordinate penalties a_i >= 0, at least one positive
struct WeightProfile {
  std::vector<double> a;
};
WeightProfile make_profile(std::vector<double> a);

struct MinNormResult {
  std::vector<double> point;  // optimizer s
  double value = 0.0;         // objective at s
  double gap = 0.0;           // duality-gap certificate, >= 0
  std::vector<std::pair<int, double>> support;  // (atom index, convex weight)
};

enum class MinNormObjective { SquaredEuclidean, XiPotential };

// Minimizes either ||s||^2 (Wolfe's min-norm-point; finite termination) or
// sum_i xi(alpha, s_i) (Frank-Wolfe with away steps) over the convex hull of
// `atoms`. Linear-minimization ties resolve to the lowest atom index. Throws
// when the iteration budget is exhausted with gap above tolerance; the error
// message carries the best value and gap reached.
MinNormResult min_norm_point(const std::vector<std::vector<double>>& atoms,
                             MinNormObjective objective, double xi_alpha = 1.0,
                             double gap_tol = 1e-9, long max_iter = 100000);

// min over y in A of sum of a_i over mismatched coordinates (a_i = 1 without
// a profile); exact linear scan
double hamming_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                        const WeightProfile* profile = nullptr);

// min over y in A of card{i : x_i = 1 and y_i = 0}; two-point factors only
long one_sided_distance(const ProductSpace& s, const Event& a, const PointVec& x);

// min over y in A of sum_i h(x_i, y_i)
double penalty_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                        const PenaltyKernel& k);

// min over (y^1 in A_1, ..., y^q in A_q) of card{i : x_i not in {y^j_i}};
// exact; throws "tuple budget exceeded" when prod |A_j| > tuple_budget
long q_point_distance(const ProductSpace& s, const std::vector<const Event*>& as,
                      const PointVec& x, uint64_t tuple_budget = 1000000);

struct ConvexDistance {
  MinNormResult mnp;      // value = squared distance
  double fc = 0.0;        // sqrt(value)
  double dual_min = 0.0;  // independent dual certificate (min over A, not atoms)
  // first member of A realizing each deduplicated atom, by atom index
  std::vector<uint64_t> atom_witness;
};

// distance from the origin to the hull of the 0/1 mismatch patterns of x
// against A; checks the dual certificate dual_min >= value - gap
ConvexDistance convex_distance(const ProductSpace& s, const Event& a, const PointVec& x);

// min over the same hull of sum_i xi(alpha, s_i)
MinNormResult xi_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                          double alpha);

using Permutation = std::vector<Symbol>;

// mismatch-pattern hull distance on the symmetric group; value is the
// squared form (no square root is taken)
MinNormResult perm_convex_distance(const std::vector<Permutation>& a,
                                   const Permutation& sigma);

// deduplicated 0/1 mismatch patterns of x against A, each with its first
// witness rank; shared by the hull distances and the sweep engine
void mismatch_atoms(const ProductSpace& s, const Event& a, const PointVec& x,
                    std::vector<uint64_t>* masks, std::vector<uint64_t>* witnesses);

}  // namespace conclab
