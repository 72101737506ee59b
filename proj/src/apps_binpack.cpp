#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conclab/apps.hpp"

namespace conclab {

namespace {

void check_sizes(const std::vector<double>& sizes) {
  for (double s : sizes)
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("item size outside (0,1]");
}

struct BnB {
  std::vector<double> items;  // sorted descending
  std::vector<double> suffix_sum;
  std::vector<double> residual;  // open bin free space
  int best;

  int lower_bound(size_t next, int used) const {
    double free_space = 0.0;
    for (double r : residual) free_space += r;
    const double need = suffix_sum[next] - free_space;
    return used + std::max(0, int(std::ceil(need - 1e-12)));
  }

  void dfs(size_t next, int used) {
    if (used >= best) return;
    if (next == items.size()) {
      best = used;
      return;
    }
    if (lower_bound(next, used) >= best) return;
    const double item = items[next];
    // existing bins, skipping duplicate residuals
    for (size_t b = 0; b < residual.size(); ++b) {
      if (residual[b] + 1e-12 < item) continue;
      bool dup = false;
      for (size_t c = 0; c < b; ++c)
        if (std::fabs(residual[c] - residual[b]) < 1e-12) {
          dup = true;
          break;
        }
      if (dup) continue;
      residual[b] -= item;
      dfs(next + 1, used);
      residual[b] += item;
    }
    // one fresh bin
    residual.push_back(1.0 - item);
    dfs(next + 1, used + 1);
    residual.pop_back();
  }
};

}  // namespace

int binpack_ffd(const std::vector<double>& sizes) {
  check_sizes(sizes);
  std::vector<double> items = sizes;
  std::sort(items.begin(), items.end(), std::greater<double>());
  std::vector<double> residual;
  for (double item : items) {
    bool placed = false;
    for (double& r : residual) {
      if (r + 1e-12 >= item) {
        r -= item;
        placed = true;
        break;
      }
    }
    if (!placed) residual.push_back(1.0 - item);
  }
  const int bins = int(residual.size());
  double total = 0.0;
  for (double s : sizes) total += s;
  if (bins > 2.0 * total + 1.0 + 1e-9) throw std::logic_error("packing bound violated");
  return bins;
}

int binpack_exact(const std::vector<double>& sizes) {
  check_sizes(sizes);
  if (sizes.size() > 32) throw std::invalid_argument("exact mode supports at most 32 items");
  if (sizes.empty()) return 0;
  BnB solver;
  solver.items = sizes;
  std::sort(solver.items.begin(), solver.items.end(), std::greater<double>());
  solver.suffix_sum.assign(solver.items.size() + 1, 0.0);
  for (size_t i = solver.items.size(); i-- > 0;)
    solver.suffix_sum[i] = solver.suffix_sum[i + 1] + solver.items[i];
  solver.best = binpack_ffd(sizes);
  solver.dfs(0, 0);
  double total = 0.0;
  for (double s : sizes) total += s;
  if (solver.best > 2.0 * total + 1.0 + 1e-9) throw std::logic_error("packing bound violated");
  return solver.best;
}

int binpack_size(const std::vector<double>& sizes, const std::string& mode) {
  if (mode == "exact") return binpack_exact(sizes);
  if (mode == "ffd") return binpack_ffd(sizes);
  throw std::invalid_argument("mode must be exact or ffd");
}

ItemDist ItemDist::parse(const std::string& text) {
  ItemDist d;
  if (text == "uniform01") {
    d.name = text;
    d.ex2 = 1.0 / 3.0;
    return d;
  }
  if (text.rfind("constant:", 0) == 0) {
    d.name = text;
    d.constant_ = std::stod(text.substr(9));
    if (!(d.constant_ > 0.0 && d.constant_ <= 1.0))
      throw std::invalid_argument("constant size outside (0,1]");
    d.ex2 = d.constant_ * d.constant_;
    return d;
  }
  throw std::invalid_argument("unknown item distribution: " + text);
}

double ItemDist::draw(RngStream& rng) const {
  if (name == "uniform01") {
    double v = rng.next_double();
    while (v == 0.0) v = rng.next_double();  // sizes live in (0,1]
    return v;
  }
  return constant_;
}

AppReport binpack_experiment(int n, const ItemDist& dist, int64_t samples, uint64_t seed,
                             const std::string& mode, const std::vector<double>& u_grid,
                             int workers) {
  if (mode == "exact" && n > 32)
    throw std::invalid_argument("exact mode supports at most 32 items");
  AppReport rep;
  rep.app = "binpack";
  rep.seed = seed;
  rep.params["N"] = std::to_string(n);
  rep.params["dist"] = dist.name;
  rep.params["mode"] = mode;
  rep.params["samples"] = std::to_string(samples);
  if (mode == "ffd")
    rep.note =
        "statistic is the first-fit-decreasing bin count, not the exact optimum; "
        "heuristic evidence only";

  TailEstimate est = mc_tail(
      "binpack-" + mode,
      [&](RngStream& rng) {
        std::vector<double> sizes(size_t(n), 0.0);
        for (auto& s : sizes) s = dist.draw(rng);
        return double(binpack_size(sizes, mode));
      },
      u_grid, samples, seed, workers, Deviation::AbsFromMedian1);

  const double denom = 16.0 * double(n) * dist.ex2;
  const double range = 4.0 * std::sqrt(2.0) * double(n) * dist.ex2;
  auto bound = [&](double u) {
    BoundValue b;
    b.equation = "6.5";
    b.value = 8.0 * std::exp(-u * u / denom);
    if (u > range) b.note = "out of stated range: requires u <= 4*sqrt(2)*N*E[X^2]";
    return b;
  };
  AppSection sec;
  sec.name = "abs-deviation";
  sec.rows = compare_tail_to_bound(est, bound);
  sec.tail = std::move(est);
  rep.pass = all_rows_pass(sec.rows);
  rep.sections.push_back(std::move(sec));
  return rep;
}

}  // namespace conclab
