#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "conclab/apps.hpp"
#include "conclab/stats.hpp"

namespace conclab {

namespace {

// vertices (x,y), x in [0,n], y in [-n,n]; index = x*(2n+1) + (y+n)
inline int vertex_index(int n, int x, int y) { return x * (2 * n + 1) + (y + n); }

}  // namespace

int fpp_edge_count(int n) {
  const int rows = 2 * n + 1;
  return n * rows          // horizontal (x,y)-(x+1,y)
         + (n + 1) * 2 * n;  // vertical (x,y)-(x,y+1)
}

double fpp_passage_time(int n, const std::vector<double>& edge_weights) {
  if (n < 1) throw std::invalid_argument("grid size must be >= 1");
  if (int(edge_weights.size()) != fpp_edge_count(n))
    throw std::invalid_argument("edge weight count mismatch");
  for (double w : edge_weights)
    if (w < 0.0) throw std::invalid_argument("negative edge weight");

  const int rows = 2 * n + 1;
  const int vcount = (n + 1) * rows;
  const int h_edges = n * rows;

  // adjacency on the fly: horizontal edge (x,y)-(x+1,y) has index
  // x*rows + (y+n); vertical edge (x,y)-(x,y+1) has h_edges + x*2n + (y+n)
  std::vector<double> dist(size_t(vcount), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  const int source = vertex_index(n, 0, 0);
  const int sink = vertex_index(n, 0, n);
  dist[size_t(source)] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[size_t(v)]) continue;
    if (v == sink) break;
    const int x = v / rows, y = v % rows - n;
    auto relax = [&](int to, double w) {
      if (d + w < dist[size_t(to)]) {
        dist[size_t(to)] = d + w;
        heap.emplace(d + w, to);
      }
    };
    if (x < n) relax(vertex_index(n, x + 1, y), edge_weights[size_t(x * rows + (y + n))]);
    if (x > 0) relax(vertex_index(n, x - 1, y), edge_weights[size_t((x - 1) * rows + (y + n))]);
    if (y < n) relax(vertex_index(n, x, y + 1),
                     edge_weights[size_t(h_edges + x * 2 * n + (y + n))]);
    if (y > -n) relax(vertex_index(n, x, y - 1),
                      edge_weights[size_t(h_edges + x * 2 * n + (y - 1 + n))]);
  }
  return dist[size_t(sink)];
}

EdgeDist EdgeDist::parse(const std::string& text) {
  EdgeDist d;
  d.name = text;
  if (text == "exp1" || text == "exp1-trunc") {
    d.k0 = 2.0;  // E exp(X/2) = 2 for Exp(1); truncation only decreases it
    return d;
  }
  if (text == "uniform01") {
    d.k0 = 1.0;  // E exp(X) = e - 1 < 2
    return d;
  }
  throw std::invalid_argument("unknown edge distribution: " + text);
}

double EdgeDist::draw(RngStream& rng) const {
  if (name == "uniform01") return rng.next_double();
  const double e = rng.next_exponential();
  if (name == "exp1-trunc") return std::min(e, 5.0);
  return e;
}

AppReport fpp_experiment(int n, const EdgeDist& dist, int64_t samples, uint64_t seed,
                         const std::vector<double>& u_grid, double r_scale, int workers) {
  AppReport rep;
  rep.app = "fpp";
  rep.seed = seed;
  rep.params["n"] = std::to_string(n);
  rep.params["dist"] = dist.name;
  rep.params["samples"] = std::to_string(samples);
  {
    std::ostringstream os;
    os << r_scale;
    rep.params["r"] = os.str();
  }
  const int edges = fpp_edge_count(n);

  TailEstimate est = mc_tail(
      "fpp",
      [&](RngStream& rng) {
        std::vector<double> w(size_t(edges), 0.0);
        for (auto& v : w) v = dist.draw(rng);
        return fpp_passage_time(n, w);
      },
      u_grid, samples, seed, workers, Deviation::AbsFromMedian);

  // K is fitted: the smallest K making every non-vacuous row pass
  double k_hat = 0.0;
  for (const auto& row : est.rows) {
    if (row.cp_upper >= 4.0) continue;  // any K works
    const double m = std::min(row.u * row.u / r_scale, row.u);
    const double need_vacuous = m / std::log(4.0);  // bound >= 1
    const double need_pass = m / std::log(4.0 / row.cp_upper);
    k_hat = std::max(k_hat, std::min(need_vacuous, need_pass));
  }
  rep.aux["K_fitted"] = k_hat;

  AppSection sec;
  sec.name = "abs-deviation";
  sec.rows = compare_tail_to_bound(est, [&](double u) {
    BoundValue b;
    b.equation = "8.3.1";
    const double m = std::min(u * u / r_scale, u);
    b.value = k_hat > 0.0 ? 4.0 * std::exp(-m / k_hat) : (u > 0 ? 0.0 : 4.0);
    std::ostringstream note;
    note << "K fitted to " << k_hat << ", not asserted";
    if (u > double(n)) note << "; outside stated range (u <= n/C')";
    b.note = note.str();
    return b;
  });

  // qualitative shape diagnostics of the empirical log-tail
  std::vector<double> xs, ys;
  double prev = std::numeric_limits<double>::infinity();
  bool nonincreasing = true;
  for (const auto& row : est.rows) {
    if (row.count == 0) continue;
    const double lt = std::log(row.point);
    if (lt > prev + 1e-12) nonincreasing = false;
    prev = lt;
    xs.push_back(row.u);
    ys.push_back(lt);
  }
  const QuadFit fit = quadratic_fit(xs, ys);
  rep.aux["log_tail_points"] = double(xs.size());
  rep.aux["log_tail_nonincreasing"] = nonincreasing ? 1.0 : 0.0;
  if (fit.ok) {
    rep.aux["log_tail_quadfit_r2"] = fit.r2;
    rep.aux["log_tail_quadfit_c2"] = fit.c2;
  }
  rep.note = "K is a fit parameter; dominance rows are descriptive, not asserted";
  sec.tail = std::move(est);
  rep.pass = nonincreasing;  // the only hard assertion here
  rep.sections.push_back(std::move(sec));
  return rep;
}

}  // namespace conclab
