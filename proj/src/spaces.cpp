#include "conclab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace conclab {

uint64_t ProductSpace::point_count(uint64_t cap) const {
  unsigned __int128 n = 1;
  for (const auto& f : factors) {
    n *= uint64_t(f.size());
    if (n > cap) {
      std::ostringstream msg;
      msg << "too large to enumerate: point count exceeds cap " << cap;
      throw std::runtime_error(msg.str());
    }
  }
  return uint64_t(n);
}

bool ProductSpace::enumerable(uint64_t cap) const {
  unsigned __int128 n = 1;
  for (const auto& f : factors) {
    n *= uint64_t(f.size());
    if (n > cap) return false;
  }
  return true;
}

uint64_t ProductSpace::rank_of(const PointVec& x) const {
  if (int(x.size()) != dimension()) throw std::invalid_argument("point dimension mismatch");
  uint64_t r = 0;
  for (int i = 0; i < dimension(); ++i) {
    if (x[i] >= factors[i].size()) throw std::out_of_range("symbol index out of range");
    r = r * uint64_t(factors[i].size()) + x[i];
  }
  return r;
}

PointVec ProductSpace::point_at(uint64_t rank) const {
  PointVec x;
  point_at_into(rank, x);
  return x;
}

void ProductSpace::point_at_into(uint64_t rank, PointVec& out) const {
  const int n = dimension();
  out.resize(n);
  for (int i = n - 1; i >= 0; --i) {
    const uint64_t s = uint64_t(factors[i].size());
    out[i] = Symbol(rank % s);
    rank /= s;
  }
}

double ProductSpace::mass_of(const PointVec& x) const {
  double m = 1.0;
  for (int i = 0; i < dimension(); ++i) m *= factors[i].weights[x[i]];
  return m;
}

double ProductSpace::mass_at(uint64_t rank) const {
  const int n = dimension();
  double m = 1.0;
  for (int i = n - 1; i >= 0; --i) {
    const uint64_t s = uint64_t(factors[i].size());
    m *= factors[i].weights[rank % s];
    rank /= s;
  }
  return m;
}

bool ProductSpace::is_two_point(double* p_out) const {
  if (factors.empty()) return false;
  const double p = factors[0].weights.size() == 2 ? factors[0].weights[1] : -1.0;
  for (const auto& f : factors) {
    if (f.size() != 2 || std::fabs(f.weights[1] - p) > 1e-12) return false;
  }
  if (p_out) *p_out = p;
  return true;
}

bool ProductSpace::is_uniform() const {
  for (const auto& f : factors) {
    const double w = 1.0 / f.size();
    for (double v : f.weights)
      if (std::fabs(v - w) > 1e-12) return false;
  }
  return true;
}

std::string ProductSpace::summary() const {
  std::ostringstream os;
  double p;
  if (is_uniform()) {
    os << "uniform" << factors[0].size() << "^" << dimension();
    for (const auto& f : factors)
      if (f.size() != factors[0].size()) return "mixed product";
    return os.str();
  }
  if (is_two_point(&p)) {
    os << "biased-" << p << "^" << dimension();
    return os.str();
  }
  os << "product of " << dimension() << " factors";
  return os.str();
}

ProductSpace make_space(const std::vector<std::vector<double>>& weight_vectors) {
  if (weight_vectors.empty()) throw std::invalid_argument("empty factor list");
  ProductSpace s;
  s.factors.reserve(weight_vectors.size());
  for (const auto& w : weight_vectors) {
    if (w.empty()) throw std::invalid_argument("empty weight vector");
    double sum = 0.0;
    for (double v : w) {
      if (!(v > 0.0)) throw std::invalid_argument("non-positive weight");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "weights sum to " << sum << ", more than 1e-9 from 1";
      throw std::invalid_argument(msg.str());
    }
    FiniteSpace f;
    f.weights.reserve(w.size());
    for (double v : w) f.weights.push_back(v / sum);
    s.factors.push_back(std::move(f));
  }
  return s;
}

ProductSpace uniform_space(int alphabet, int n) {
  if (alphabet < 1 || n < 1) throw std::invalid_argument("bad space shape");
  std::vector<std::vector<double>> ws(n, std::vector<double>(alphabet, 1.0 / alphabet));
  return make_space(ws);
}

ProductSpace two_point_space(double p, int n) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bias must be in (0,1)");
  std::vector<std::vector<double>> ws(n, std::vector<double>{1.0 - p, p});
  return make_space(ws);
}

Event make_event(const ProductSpace& s, std::vector<uint64_t> ranks) {
  const uint64_t total = s.point_count();
  if (ranks.empty()) throw std::invalid_argument("event must be nonempty");
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
  if (ranks.back() >= total) throw std::out_of_range("event member out of range");
  Event e;
  e.ranks = std::move(ranks);
  e.bits.assign((total + 63) / 64, 0);
  double sum = 0.0, comp = 0.0;
  for (uint64_t r : e.ranks) {
    e.bits[r >> 6] |= uint64_t(1) << (r & 63);
    const double y = s.mass_at(r) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  e.measure = sum;
  return e;
}

Event make_event_points(const ProductSpace& s, const std::vector<PointVec>& pts) {
  std::vector<uint64_t> ranks;
  ranks.reserve(pts.size());
  for (const auto& p : pts) ranks.push_back(s.rank_of(p));
  return make_event(s, std::move(ranks));
}

Event event_from_bitmask(const ProductSpace& s, uint64_t mask) {
  std::vector<uint64_t> ranks;
  for (uint64_t r = 0; r < 64; ++r)
    if ((mask >> r) & 1u) ranks.push_back(r);
  return make_event(s, std::move(ranks));
}

double measure_of(const ProductSpace& s, const Event& a) {
  double sum = 0.0, comp = 0.0;
  for (uint64_t r : a.ranks) {
    const double y = s.mass_at(r) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void for_each_point(const ProductSpace& s,
                    const std::function<void(uint64_t, const PointVec&, double)>& fn) {
  const uint64_t total = s.point_count();
  const int n = s.dimension();
  PointVec x(n, 0);
  for (uint64_t rank = 0; rank < total; ++rank) {
    fn(rank, x, s.mass_of(x));
    // mixed-radix increment, last coordinate fastest
    for (int i = n - 1; i >= 0; --i) {
      if (++x[i] < s.factors[i].size()) break;
      x[i] = 0;
    }
  }
}

PointVec sample_point(const ProductSpace& s, RngStream& rng) {
  const int n = s.dimension();
  PointVec x(n);
  for (int i = 0; i < n; ++i) {
    const auto& w = s.factors[i].weights;
    const double u = rng.next_double();
    double acc = 0.0;
    Symbol pick = Symbol(w.size() - 1);
    for (size_t j = 0; j < w.size(); ++j) {
      acc += w[j];
      if (u < acc) {
        pick = Symbol(j);
        break;
      }
    }
    x[i] = pick;
  }
  return x;
}

Event sample_event(const ProductSpace& s, RngStream& rng) {
  const uint64_t total = s.point_count();
  static const double kProbs[3] = {0.125, 0.25, 0.5};
  for (;;) {
    const double p = kProbs[rng.next_index(3)];
    std::vector<uint64_t> ranks;
    for (uint64_t r = 0; r < total; ++r)
      if (rng.next_double() < p) ranks.push_back(r);
    if (!ranks.empty()) return make_event(s, std::move(ranks));
  }
}

Event event_from_predicate(const ProductSpace& s, const std::string& name,
                           long k, const PointVec* point) {
  if (name == "singleton") {
    if (!point) throw std::invalid_argument("singleton predicate needs a point");
    return make_event(s, {s.rank_of(*point)});
  }
  const bool le = name == "sum-le-k";
  if (!le && name != "sum-ge-k")
    throw std::invalid_argument("unknown predicate: " + name);
  std::vector<uint64_t> ranks;
  for_each_point(s, [&](uint64_t rank, const PointVec& x, double) {
    long sum = 0;
    for (Symbol v : x) sum += v;
    if (le ? sum <= k : sum >= k) ranks.push_back(rank);
  });
  if (ranks.empty()) throw std::invalid_argument("predicate selects no point");
  return make_event(s, std::move(ranks));
}

ProductSpace space_from_shorthand(const std::string& text) {
  const auto caret = text.find('^');
  if (caret == std::string::npos)
    throw std::invalid_argument("bad space shorthand: " + text);
  const int n = std::stoi(text.substr(caret + 1));
  const std::string head = text.substr(0, caret);
  if (head.rfind("uniform", 0) == 0) {
    const int alphabet = std::stoi(head.substr(7));
    return uniform_space(alphabet, n);
  }
  if (head.rfind("biased-", 0) == 0) {
    const double p = std::stod(head.substr(7));
    return two_point_space(p, n);
  }
  throw std::invalid_argument("bad space shorthand: " + text);
}

}  // namespace conclab
