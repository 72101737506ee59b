#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "conclab/rng.hpp"

namespace conclab {

// Largest point count that exact enumeration loops will touch.
inline constexpr uint64_t kDefaultEnumCap = uint64_t(1) << 24;

using Symbol = uint16_t;
using PointVec = std::vector<Symbol>;

// One finite coordinate space: alphabet {0,...,size-1} with positive
// weights summing to 1.
struct FiniteSpace {
  std::vector<double> weights;
  int size() const { return int(weights.size()); }
};

// Product of finite factors with the product measure. Enumeration order is
// mixed-radix with the last coordinate varying fastest.
struct ProductSpace {
  std::vector<FiniteSpace> factors;

  int dimension() const { return int(factors.size()); }
  // throws when the total point count exceeds `cap`, naming the count
  uint64_t point_count(uint64_t cap = kDefaultEnumCap) const;
  bool enumerable(uint64_t cap = kDefaultEnumCap) const;

  uint64_t rank_of(const PointVec& x) const;
  PointVec point_at(uint64_t rank) const;
  void point_at_into(uint64_t rank, PointVec& out) const;
  double mass_of(const PointVec& x) const;
  double mass_at(uint64_t rank) const;

  // true when every factor is {0,1} with the same weight on symbol 1
  bool is_two_point(double* p_out = nullptr) const;
  bool is_uniform() const;

  std::string summary() const;
};

// Subset of an enumerable space: sorted point ranks, a bitset for O(1)
// membership, and the cached measure.
struct Event {
  std::vector<uint64_t> ranks;
  std::vector<uint64_t> bits;
  double measure = 0.0;

  size_t size() const { return ranks.size(); }
  bool empty() const { return ranks.empty(); }
  bool contains(uint64_t rank) const {
    return (bits[rank >> 6] >> (rank & 63)) & 1u;
  }
};

// Factory; validates weights (> 0, sum within 1e-9 of 1) and renormalizes.
ProductSpace make_space(const std::vector<std::vector<double>>& weight_vectors);
ProductSpace uniform_space(int alphabet, int n);
// two-point factors with weights {1-p, p}
ProductSpace two_point_space(double p, int n);

Event make_event(const ProductSpace& s, std::vector<uint64_t> ranks);
Event make_event_points(const ProductSpace& s, const std::vector<PointVec>& pts);
Event event_from_bitmask(const ProductSpace& s, uint64_t mask);  // point count <= 64

double measure_of(const ProductSpace& s, const Event& a);

// visits every point in enumeration order with its rank and mass
void for_each_point(const ProductSpace& s,
                    const std::function<void(uint64_t, const PointVec&, double)>& fn);

// independent draw of each coordinate from its factor weights
PointVec sample_point(const ProductSpace& s, RngStream& rng);

// include-each-point-independently with inclusion probability drawn from
// {1/8, 1/4, 1/2}; empty results are rejected and redrawn on the same stream
Event sample_event(const ProductSpace& s, RngStream& rng);

// builtin predicates: "sum-le-k", "sum-ge-k", "singleton"
Event event_from_predicate(const ProductSpace& s, const std::string& name,
                           long k, const PointVec* point = nullptr);

// "uniform2^3", "uniform3^2", "biased-0.3^4"
ProductSpace space_from_shorthand(const std::string& text);

}  // namespace conclab
