#include "conclab/distances.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conclab/bounds.hpp"

namespace conclab {

namespace {

void require_nonempty(const Event& a) {
  if (a.empty()) throw std::invalid_argument("event must be nonempty");
}

// solves min ||a0 + B c||^2 by normal equations with complete pivoting;
// directions with pivot below 1e-12 (relative) get coefficient 0
std::vector<double> least_squares_affine(const std::vector<const std::vector<double>*>& atoms) {
  const size_t k = atoms.size();
  const size_t dim = atoms[0]->size();
  if (k == 1) return {1.0};
  const auto& a0 = *atoms[0];
  const size_t m = k - 1;
  // gram of the difference directions and the right-hand side
  std::vector<double> G(m * m, 0.0), rhs(m, 0.0);
  std::vector<double> diff_i(dim), diff_j(dim);
  for (size_t i = 0; i < m; ++i) {
    const auto& ai = *atoms[i + 1];
    for (size_t d = 0; d < dim; ++d) diff_i[d] = ai[d] - a0[d];
    for (size_t j = i; j < m; ++j) {
      const auto& aj = *atoms[j + 1];
      double dot = 0.0;
      for (size_t d = 0; d < dim; ++d) dot += diff_i[d] * (aj[d] - a0[d]);
      G[i * m + j] = G[j * m + i] = dot;
    }
    double b = 0.0;
    for (size_t d = 0; d < dim; ++d) b += diff_i[d] * a0[d];
    rhs[i] = -b;
  }
  double scale = 0.0;
  for (size_t i = 0; i < m; ++i) scale = std::max(scale, std::fabs(G[i * m + i]));
  const double pivot_tol = 1e-12 * std::max(1.0, scale);

  // gaussian elimination with complete pivoting; track column permutation
  std::vector<size_t> col_of(m);
  for (size_t i = 0; i < m; ++i) col_of[i] = i;
  std::vector<double> c(m, 0.0);
  size_t rank = 0;
  for (size_t step = 0; step < m; ++step) {
    size_t pr = step, pc = step;
    double best = 0.0;
    for (size_t r = step; r < m; ++r)
      for (size_t cc = step; cc < m; ++cc)
        if (std::fabs(G[r * m + col_of[cc]]) > best) {
          best = std::fabs(G[r * m + col_of[cc]]);
          pr = r;
          pc = cc;
        }
    if (best <= pivot_tol) break;
    std::swap(col_of[step], col_of[pc]);
    if (pr != step) {
      for (size_t cc = 0; cc < m; ++cc) std::swap(G[step * m + cc], G[pr * m + cc]);
      std::swap(rhs[step], rhs[pr]);
    }
    const double piv = G[step * m + col_of[step]];
    for (size_t r = step + 1; r < m; ++r) {
      const double f = G[r * m + col_of[step]] / piv;
      if (f == 0.0) continue;
      for (size_t cc = step; cc < m; ++cc)
        G[r * m + col_of[cc]] -= f * G[step * m + col_of[cc]];
      rhs[r] -= f * rhs[step];
    }
    rank = step + 1;
  }
  for (size_t step = rank; step-- > 0;) {
    double v = rhs[step];
    for (size_t cc = step + 1; cc < rank; ++cc)
      v -= G[step * m + col_of[cc]] * c[col_of[cc]];
    c[col_of[step]] = v / G[step * m + col_of[step]];
  }
  std::vector<double> lambda(k);
  double sum = 0.0;
  for (size_t i = 0; i < m; ++i) {
    lambda[i + 1] = c[i];
    sum += c[i];
  }
  lambda[0] = 1.0 - sum;
  return lambda;
}

MinNormResult wolfe_mnp(const std::vector<std::vector<double>>& atoms, double gap_tol,
                        long max_iter) {
  const size_t m = atoms.size();
  const size_t dim = atoms[0].size();

  // start from the smallest-norm atom, first index on ties
  size_t start = 0;
  double best_norm = 0.0;
  for (size_t i = 0; i < m; ++i) {
    double n2 = 0.0;
    for (double v : atoms[i]) n2 += v * v;
    if (i == 0 || n2 < best_norm) {
      best_norm = n2;
      start = i;
    }
  }
  std::vector<int> corral{int(start)};
  std::vector<double> weights{1.0};
  std::vector<double> x = atoms[start];

  auto value_of = [&](const std::vector<double>& v) {
    double n2 = 0.0;
    for (double e : v) n2 += e * e;
    return n2;
  };

  double gap = 0.0;
  long iter = 0;
  for (;;) {
    if (++iter > max_iter) {
      std::ostringstream msg;
      msg << "min-norm-point budget exhausted: value=" << value_of(x) << " gap=" << gap;
      throw std::runtime_error(msg.str());
    }
    // linear minimization over all atoms
    size_t best_idx = 0;
    double best_dot = 0.0;
    for (size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (size_t d = 0; d < dim; ++d) dot += x[d] * atoms[i][d];
      if (i == 0 || dot < best_dot) {
        best_dot = dot;
        best_idx = i;
      }
    }
    const double xx = value_of(x);
    gap = xx - best_dot;
    if (gap <= gap_tol) break;

    if (std::find(corral.begin(), corral.end(), int(best_idx)) == corral.end()) {
      corral.push_back(int(best_idx));
      weights.push_back(0.0);
    }

    // minor cycles: move to the affine minimizer of the corral, clipping at
    // the boundary of the simplex and dropping atoms that hit weight zero
    for (;;) {
      if (++iter > max_iter) {
        std::ostringstream msg;
        msg << "min-norm-point budget exhausted: value=" << value_of(x) << " gap=" << gap;
        throw std::runtime_error(msg.str());
      }
      std::vector<const std::vector<double>*> cats;
      cats.reserve(corral.size());
      for (int idx : corral) cats.push_back(&atoms[idx]);
      const std::vector<double> mu = least_squares_affine(cats);

      bool feasible = true;
      for (double w : mu)
        if (w < -1e-12) feasible = false;
      if (feasible) {
        weights = mu;
        break;
      }
      double theta = 1.0;
      for (size_t i = 0; i < mu.size(); ++i)
        if (mu[i] < weights[i])
          theta = std::min(theta, weights[i] / (weights[i] - mu[i]));
      for (size_t i = 0; i < mu.size(); ++i)
        weights[i] += theta * (mu[i] - weights[i]);
      // drop zeroed atoms
      std::vector<int> nc;
      std::vector<double> nw;
      for (size_t i = 0; i < weights.size(); ++i)
        if (weights[i] > 1e-12) {
          nc.push_back(corral[i]);
          nw.push_back(weights[i]);
        }
      corral = std::move(nc);
      weights = std::move(nw);
      double tot = 0.0;
      for (double w : weights) tot += w;
      for (double& w : weights) w /= tot;
    }
    x.assign(dim, 0.0);
    for (size_t i = 0; i < corral.size(); ++i)
      for (size_t d = 0; d < dim; ++d) x[d] += weights[i] * atoms[corral[i]][d];
  }

  MinNormResult res;
  res.point = x;
  res.value = value_of(x);
  res.gap = gap;
  for (size_t i = 0; i < corral.size(); ++i)
    if (weights[i] > 1e-12) res.support.emplace_back(corral[i], weights[i]);
  std::sort(res.support.begin(), res.support.end());
  return res;
}

constexpr double kXiClamp = 1.0 - 1e-12;

MinNormResult frank_wolfe_xi(const std::vector<std::vector<double>>& atoms, double alpha,
                             double gap_tol, long max_iter) {
  const size_t m = atoms.size();
  const size_t dim = atoms[0].size();

  auto objective = [&](const std::vector<double>& s) {
    double v = 0.0;
    for (double u : s) v += xi(alpha, std::min(u, 1.0));
    return v;
  };

  // start from the atom of least objective, first index on ties;
  // atoms are 0/1 so this is the sparsest one
  size_t start = 0;
  double best_val = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double v = objective(atoms[i]);
    if (i == 0 || v < best_val) {
      best_val = v;
      start = i;
    }
  }
  std::vector<double> lambda(m, 0.0);
  lambda[start] = 1.0;
  std::vector<double> s(dim);
  for (size_t d = 0; d < dim; ++d) s[d] = std::min(atoms[start][d], kXiClamp);

  std::vector<double> grad(dim), dir(dim);
  double gap = 0.0;
  for (long iter = 0; iter < max_iter; ++iter) {
    for (size_t d = 0; d < dim; ++d) grad[d] = xi_du(alpha, std::min(s[d], kXiClamp));

    // toward atom (global LMO) and away atom (over the active set)
    size_t fw = 0, away = 0;
    double fw_dot = 0.0, away_dot = 0.0;
    bool have_away = false;
    for (size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (size_t d = 0; d < dim; ++d) dot += grad[d] * atoms[i][d];
      if (i == 0 || dot < fw_dot) {
        fw_dot = dot;
        fw = i;
      }
      if (lambda[i] > 0.0 && (!have_away || dot > away_dot)) {
        away_dot = dot;
        away = i;
        have_away = true;
      }
    }
    double sg = 0.0;
    for (size_t d = 0; d < dim; ++d) sg += grad[d] * s[d];
    gap = sg - fw_dot;
    if (gap <= gap_tol) {
      MinNormResult res;
      res.point = s;
      res.value = objective(s);
      res.gap = gap;
      for (size_t i = 0; i < m; ++i)
        if (lambda[i] > 1e-12) res.support.emplace_back(int(i), lambda[i]);
      return res;
    }

    const bool use_fw = (sg - fw_dot) >= (away_dot - sg);
    double gamma_max;
    if (use_fw) {
      for (size_t d = 0; d < dim; ++d) dir[d] = atoms[fw][d] - s[d];
      gamma_max = 1.0;
    } else {
      for (size_t d = 0; d < dim; ++d) dir[d] = s[d] - atoms[away][d];
      gamma_max = lambda[away] >= 1.0 ? 1e30 : lambda[away] / (1.0 - lambda[away]);
    }
    // keep every coordinate at or below the clamp
    for (size_t d = 0; d < dim; ++d) {
      if (dir[d] > 0.0) gamma_max = std::min(gamma_max, (kXiClamp - s[d]) / dir[d]);
    }
    if (gamma_max <= 0.0) gamma_max = 0.0;

    // derivative of the 1-d slice is increasing; bisect for its zero
    auto slope = [&](double g) {
      double v = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double u = std::min(s[d] + g * dir[d], kXiClamp);
        v += xi_du(alpha, u) * dir[d];
      }
      return v;
    };
    double gamma = gamma_max;
    if (gamma_max > 0.0 && slope(gamma_max) > 0.0) {
      double lo = 0.0, hi = gamma_max;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
      }
      gamma = 0.5 * (lo + hi);
    }
    if (gamma <= 0.0 && use_fw) continue;  // blocked by the clamp only

    if (use_fw) {
      for (double& l : lambda) l *= 1.0 - gamma;
      lambda[fw] += gamma;
    } else {
      for (double& l : lambda) l *= 1.0 + gamma;
      lambda[away] -= gamma;
      if (lambda[away] < 1e-15) lambda[away] = 0.0;
    }
    for (size_t d = 0; d < dim; ++d)
      s[d] = std::min(s[d] + gamma * dir[d], kXiClamp);
  }

  std::ostringstream msg;
  msg << "xi-distance budget exhausted: value=" << objective(s) << " gap=" << gap;
  throw std::runtime_error(msg.str());
}

}  // namespace

WeightProfile make_profile(std::vector<double> a) {
  bool positive = false;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("profile entries must be >= 0");
    if (v > 0.0) positive = true;
  }
  if (!positive) throw std::invalid_argument("profile must have a positive entry");
  return WeightProfile{std::move(a)};
}

MinNormResult min_norm_point(const std::vector<std::vector<double>>& atoms,
                             MinNormObjective objective, double xi_alpha,
                             double gap_tol, long max_iter) {
  if (atoms.empty()) throw std::invalid_argument("empty atom family");
  for (const auto& a : atoms)
    if (a.size() != atoms[0].size()) throw std::invalid_argument("atom dimension mismatch");
  if (objective == MinNormObjective::SquaredEuclidean)
    return wolfe_mnp(atoms, gap_tol, max_iter);
  if (xi_alpha < 1.0) throw std::invalid_argument("alpha must be >= 1");
  return frank_wolfe_xi(atoms, xi_alpha, gap_tol, max_iter);
}

double hamming_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                        const WeightProfile* profile) {
  require_nonempty(a);
  const int n = s.dimension();
  if (profile && int(profile->a.size()) != n)
    throw std::invalid_argument("profile dimension mismatch");
  double best = 0.0;
  bool first = true;
  PointVec y;
  for (uint64_t r : a.ranks) {
    s.point_at_into(r, y);
    double d = 0.0;
    for (int i = 0; i < n; ++i)
      if (x[i] != y[i]) d += profile ? profile->a[i] : 1.0;
    if (first || d < best) {
      best = d;
      first = false;
    }
    if (best == 0.0) break;
  }
  return best;
}

long one_sided_distance(const ProductSpace& s, const Event& a, const PointVec& x) {
  require_nonempty(a);
  for (const auto& f : s.factors)
    if (f.size() != 2) throw std::invalid_argument("one-sided distance needs two-point factors");
  const int n = s.dimension();
  long best = -1;
  PointVec y;
  for (uint64_t r : a.ranks) {
    s.point_at_into(r, y);
    long d = 0;
    for (int i = 0; i < n; ++i)
      if (x[i] == 1 && y[i] == 0) ++d;
    if (best < 0 || d < best) best = d;
    if (best == 0) break;
  }
  return best;
}

double penalty_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                        const PenaltyKernel& k) {
  require_nonempty(a);
  for (const auto& f : s.factors)
    if (f.size() != k.alphabet)
      throw std::invalid_argument("kernel alphabet does not match the space");
  const int n = s.dimension();
  double best = -1.0;
  PointVec y;
  for (uint64_t r : a.ranks) {
    s.point_at_into(r, y);
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += k.at(x[i], y[i]);
    if (best < 0.0 || d < best) best = d;
    if (best == 0.0) break;
  }
  return best;
}

long q_point_distance(const ProductSpace& s, const std::vector<const Event*>& as,
                      const PointVec& x, uint64_t tuple_budget) {
  if (as.size() < 2) throw std::invalid_argument("q must be >= 2");
  const int n = s.dimension();
  if (n > 64) throw std::invalid_argument("q-point distance supports up to 64 coordinates");
  unsigned __int128 tuples = 1;
  for (const Event* a : as) {
    if (!a || a->empty()) throw std::invalid_argument("every component event must be nonempty");
    tuples *= a->size();
    if (tuples > tuple_budget) throw std::runtime_error("tuple budget exceeded");
  }
  // the distance depends on each y only through its mismatch mask, so scan
  // over deduplicated masks per component
  std::vector<std::vector<uint64_t>> masks(as.size());
  PointVec y;
  for (size_t j = 0; j < as.size(); ++j) {
    auto& mj = masks[j];
    for (uint64_t r : as[j]->ranks) {
      s.point_at_into(r, y);
      uint64_t m = 0;
      for (int i = 0; i < n; ++i)
        if (x[i] != y[i]) m |= uint64_t(1) << i;
      mj.push_back(m);
    }
    std::sort(mj.begin(), mj.end());
    mj.erase(std::unique(mj.begin(), mj.end()), mj.end());
  }
  long best = n + 1;
  std::vector<size_t> pick(as.size(), 0);
  for (;;) {
    uint64_t inter = ~uint64_t(0);
    for (size_t j = 0; j < as.size(); ++j) inter &= masks[j][pick[j]];
    if (n < 64) inter &= (uint64_t(1) << n) - 1;
    best = std::min(best, long(std::popcount(inter)));
    if (best == 0) return 0;
    size_t j = 0;
    while (j < as.size() && ++pick[j] == masks[j].size()) pick[j++] = 0;
    if (j == as.size()) break;
  }
  return best;
}

void mismatch_atoms(const ProductSpace& s, const Event& a, const PointVec& x,
                    std::vector<uint64_t>* masks, std::vector<uint64_t>* witnesses) {
  require_nonempty(a);
  const int n = s.dimension();
  if (n > 64) throw std::invalid_argument("mismatch atoms support up to 64 coordinates");
  masks->clear();
  if (witnesses) witnesses->clear();
  std::vector<uint64_t> seen;
  PointVec y;
  for (uint64_t r : a.ranks) {
    s.point_at_into(r, y);
    uint64_t m = 0;
    for (int i = 0; i < n; ++i)
      if (x[i] != y[i]) m |= uint64_t(1) << i;
    if (std::find(seen.begin(), seen.end(), m) == seen.end()) {
      seen.push_back(m);
      masks->push_back(m);
      if (witnesses) witnesses->push_back(r);
    }
  }
}

namespace {

std::vector<std::vector<double>> masks_to_atoms(const std::vector<uint64_t>& masks, int n) {
  std::vector<std::vector<double>> atoms(masks.size(), std::vector<double>(n, 0.0));
  for (size_t i = 0; i < masks.size(); ++i)
    for (int d = 0; d < n; ++d)
      if ((masks[i] >> d) & 1u) atoms[i][d] = 1.0;
  return atoms;
}

}  // namespace

ConvexDistance convex_distance(const ProductSpace& s, const Event& a, const PointVec& x) {
  ConvexDistance out;
  std::vector<uint64_t> masks;
  mismatch_atoms(s, a, x, &masks, &out.atom_witness);
  const int n = s.dimension();
  const auto atoms = masks_to_atoms(masks, n);
  out.mnp = min_norm_point(atoms, MinNormObjective::SquaredEuclidean);
  out.fc = std::sqrt(std::max(0.0, out.mnp.value));

  // Hahn-Banach style certificate in the direction of the optimizer,
  // recomputed with a fresh scan of A
  const auto& sstar = out.mnp.point;
  double dual = 0.0;
  bool first = true;
  PointVec y;
  for (uint64_t r : a.ranks) {
    s.point_at_into(r, y);
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      if (x[i] != y[i]) v += sstar[i];
    if (first || v < dual) {
      dual = v;
      first = false;
    }
  }
  out.dual_min = dual;
  const double slack = 1e-7 * std::max(1.0, out.mnp.value);
  if (dual < out.mnp.value - out.mnp.gap - slack)
    throw std::logic_error("dual certificate violated");
  return out;
}

MinNormResult xi_distance(const ProductSpace& s, const Event& a, const PointVec& x,
                          double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("alpha must be >= 1");
  std::vector<uint64_t> masks;
  mismatch_atoms(s, a, x, &masks, nullptr);
  const auto atoms = masks_to_atoms(masks, s.dimension());
  return min_norm_point(atoms, MinNormObjective::XiPotential, alpha);
}

MinNormResult perm_convex_distance(const std::vector<Permutation>& a,
                                   const Permutation& sigma) {
  if (a.empty()) throw std::invalid_argument("event must be nonempty");
  const size_t n = sigma.size();
  if (n > 64) throw std::invalid_argument("permutation size too large");
  for (const auto& tau : a)
    if (tau.size() != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<uint64_t> masks;
  for (const auto& tau : a) {
    uint64_t m = 0;
    for (size_t i = 0; i < n; ++i)
      if (tau[i] != sigma[i]) m |= uint64_t(1) << i;
    if (std::find(masks.begin(), masks.end(), m) == masks.end()) masks.push_back(m);
  }
  const auto atoms = masks_to_atoms(masks, int(n));
  return min_norm_point(atoms, MinNormObjective::SquaredEuclidean);
}

}  // namespace conclab
