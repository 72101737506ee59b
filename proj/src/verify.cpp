#include "conclab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "conclab/stats.hpp"
#include "json.hpp"

namespace conclab {

void parallel_for(int64_t n, int workers, const std::function<void(int64_t)>& fn) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = int(std::min<int64_t>(workers, n));
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_workers() {
  if (const char* env = std::getenv("CONCLAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

// ---------------------------------------------------------------------------

double exact_exp_moment(const ProductSpace& s, const Event& a, const Functional& f,
                        double t) {
  if (a.empty()) throw std::invalid_argument("event must be nonempty");
  double sum = 0.0, comp = 0.0;
  auto add = [&](double v) {
    const double y = v - comp;
    const double tt = sum + y;
    comp = (tt - sum) - y;
    sum = tt;
  };
  std::vector<const Event*> qev;
  if (f.kind == Functional::Kind::QPoint) {
    qev.push_back(&a);
    for (const Event* e : f.helpers) qev.push_back(e);
  }
  for_each_point(s, [&](uint64_t, const PointVec& x, double mass) {
    double fx = 0.0;
    switch (f.kind) {
      case Functional::Kind::Hamming:
        fx = hamming_distance(s, a, x, f.profile);
        break;
      case Functional::Kind::OneSided:
        fx = double(one_sided_distance(s, a, x));
        break;
      case Functional::Kind::Penalty:
        fx = penalty_distance(s, a, x, *f.kernel);
        break;
      case Functional::Kind::QPoint:
        fx = double(q_point_distance(s, qev, x));
        break;
      case Functional::Kind::ConvexSq:
        fx = convex_distance(s, a, x).mnp.value;
        break;
      case Functional::Kind::XiPotential:
        fx = xi_distance(s, a, x, f.alpha).value;
        break;
    }
    add(mass * std::exp(t * fx));
  });
  return sum;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSlackTol = 1e-9;

void finish_report(ExactCheckReport& rep) {
  for (int64_t i = 0; i < int64_t(rep.rows.size()); ++i) {
    auto& r = rep.rows[i];
    r.slack = r.rhs - r.lhs;
    if (r.slack < -kSlackTol * std::max(1.0, r.rhs)) rep.counterexamples.push_back(i);
  }
}

std::vector<Event> materialize_events(const ProductSpace& s, const EventSource& src,
                                      uint64_t seed, std::string* note) {
  if (src.kind == EventSource::Kind::Explicit) return src.events;
  if (src.kind == EventSource::Kind::All) {
    const uint64_t points = s.point_count();
    if (points <= 20) {
      std::vector<Event> out;
      const uint64_t total = uint64_t(1) << points;
      out.reserve(total - 1);
      for (uint64_t mask = 1; mask < total; ++mask)
        out.push_back(event_from_bitmask(s, mask));
      return out;
    }
    // 2^(point count) events is beyond the all-events cap: fall back to
    // sampling, and say so in the report
    if (note)
      *note = "all-events request exceeds the 2^20 cap; sampled 2000 events instead";
    std::vector<Event> out(2000, Event{});
    for (int64_t i = 0; i < 2000; ++i) {
      RngStream rng(seed, uint64_t(i));
      out[size_t(i)] = sample_event(s, rng);
    }
    return out;
  }
  std::vector<Event> out(size_t(src.count));
  for (int64_t i = 0; i < src.count; ++i) {
    RngStream rng(seed, uint64_t(i));
    out[size_t(i)] = sample_event(s, rng);
  }
  return out;
}

// generic grid x events sweep with per-cell closed forms
ExactCheckReport grid_sweep(
    const ProductSpace& s, const std::string& equation, const std::vector<double>& grid,
    const EventSource& src, uint64_t seed, int workers,
    const std::function<void(const Event&, double, SweepRow&)>& cell) {
  ExactCheckReport rep;
  rep.equation = equation;
  rep.space = s.summary();
  rep.seed = seed;
  const std::vector<Event> events = materialize_events(s, src, seed, &rep.note);
  const int64_t g = int64_t(grid.size());
  rep.rows.assign(size_t(int64_t(events.size()) * g), SweepRow{});
  parallel_for(int64_t(events.size()), workers, [&](int64_t e) {
    for (int64_t j = 0; j < g; ++j) {
      SweepRow& row = rep.rows[size_t(e * g + j)];
      row.pA = events[size_t(e)].measure;
      row.t = grid[size_t(j)];
      cell(events[size_t(e)], grid[size_t(j)], row);
    }
  });
  finish_report(rep);
  return rep;
}

}  // namespace

ExactCheckReport sweep_hamming_moment(const ProductSpace& s, const std::vector<double>& t_grid,
                                      const EventSource& src, uint64_t seed, int workers,
                                      const WeightProfile* profile) {
  const long n = s.dimension();
  return grid_sweep(s, profile ? "2.1.8" : "2.1.2", t_grid, src, seed, workers,
                    [&, n](const Event& a, double t, SweepRow& row) {
                      Functional f;
                      f.kind = Functional::Kind::Hamming;
                      f.profile = profile;
                      row.lhs = exact_exp_moment(s, a, f, t);
                      BoundQuery q;
                      q.N = n;
                      q.pA = a.measure;
                      q.t = t;
                      if (profile) q.profile = profile->a;
                      row.rhs = hamming_moment(q).value;
                    });
}

ExactCheckReport sweep_hamming_tail(const ProductSpace& s, const std::vector<double>& k_grid,
                                    const EventSource& src, uint64_t seed, int workers,
                                    const WeightProfile* profile) {
  const long n = s.dimension();
  return grid_sweep(s, profile ? "2.1.9" : "2.1.3", k_grid, src, seed, workers,
                    [&, n](const Event& a, double k, SweepRow& row) {
                      double tail = 0.0, comp = 0.0;
                      for_each_point(s, [&](uint64_t, const PointVec& x, double mass) {
                        if (hamming_distance(s, a, x, profile) >= k) {
                          const double y = mass - comp;
                          const double t2 = tail + y;
                          comp = (t2 - tail) - y;
                          tail = t2;
                        }
                      });
                      row.lhs = tail;
                      BoundQuery q;
                      q.N = n;
                      q.pA = a.measure;
                      if (profile) {
                        q.u = k;
                        q.profile = profile->a;
                      } else {
                        q.k = k;
                      }
                      row.rhs = hamming_tail(q).value;
                    });
}

ExactCheckReport sweep_two_point_moment(const ProductSpace& s, double alpha,
                                        const std::vector<double>& t_grid,
                                        const EventSource& src, uint64_t seed, int workers) {
  double p = 0.0;
  if (!s.is_two_point(&p))
    throw std::invalid_argument("two-point sweep needs equal two-point factors");
  const long n = s.dimension();
  ExactCheckReport rep =
      grid_sweep(s, "2.3.1", t_grid, src, seed, workers,
                 [&, n, p, alpha](const Event& a, double t, SweepRow& row) {
                   Functional f;
                   f.kind = Functional::Kind::Hamming;
                   row.lhs = exact_exp_moment(s, a, f, t);
                   row.rhs = std::pow(two_point_b(alpha, t, p), double(n)) /
                             std::pow(a.measure, alpha);
                 });
  std::ostringstream os;
  os << (rep.note.empty() ? "" : rep.note + "; ") << "alpha=" << alpha;
  rep.note = os.str();
  return rep;
}

ExactCheckReport sweep_one_sided_moment(const ProductSpace& s, double p1,
                                        const EventSource& src, uint64_t seed, int workers) {
  double p = 0.0;
  if (!s.is_two_point(&p))
    throw std::invalid_argument("one-sided sweep needs equal two-point factors");
  const double base = one_sided_moment_base(p, p1);
  const ProductSpace s1 = two_point_space(p1, s.dimension());
  return grid_sweep(s, "2.3.7", {std::log(base)}, src, seed, workers,
                    [&](const Event& a, double logbase, SweepRow& row) {
                      Functional f;
                      f.kind = Functional::Kind::OneSided;
                      row.lhs = exact_exp_moment(s, a, f, logbase);
                      row.rhs = 1.0 / measure_of(s1, a);
                    });
}

ExactCheckReport sweep_penalty_moment(const ProductSpace& s, const PenaltyKernel& kernel,
                                      const std::vector<double>& t_grid,
                                      const EventSource& src, uint64_t seed, int workers) {
  const long n = s.dimension();
  return grid_sweep(s, "2.4.4", t_grid, src, seed, workers,
                    [&, n](const Event& a, double t, SweepRow& row) {
                      Functional f;
                      f.kind = Functional::Kind::Penalty;
                      f.kernel = &kernel;
                      row.lhs = exact_exp_moment(s, a, f, t);
                      BoundQuery q;
                      q.N = n;
                      q.pA = a.measure;
                      q.t = t;
                      row.rhs = penalty_bounds(q, kernel)[0].value;
                    });
}

ExactCheckReport sweep_penalty_tail(const ProductSpace& s, const PenaltyKernel& kernel,
                                    const std::vector<double>& u_grid,
                                    const EventSource& src, uint64_t seed, int workers) {
  const double integral = kernel_exp_integral(kernel);
  if (integral > 2.0 + 1e-12) {
    std::ostringstream msg;
    msg << "integrability precondition fails: integral of exp(h) = " << integral << " > 2";
    throw std::runtime_error(msg.str());
  }
  const long n = s.dimension();
  return grid_sweep(s, "2.4.13", u_grid, src, seed, workers,
                    [&, n](const Event& a, double u, SweepRow& row) {
                      double tail = 0.0, comp = 0.0;
                      for_each_point(s, [&](uint64_t, const PointVec& x, double mass) {
                        if (penalty_distance(s, a, x, kernel) >= u) {
                          const double y = mass - comp;
                          const double t2 = tail + y;
                          comp = (t2 - tail) - y;
                          tail = t2;
                        }
                      });
                      row.lhs = tail;
                      row.rhs = std::exp(-u * u / (4.0 * double(n))) / a.measure;
                    });
}

ExactCheckReport sweep_q_point_moment(const ProductSpace& s, int q, double alpha,
                                      int64_t n_tuples, uint64_t seed, int workers) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  ExactCheckReport rep;
  std::ostringstream eq;
  eq << (alpha == 1.0 ? "3.1.2" : "3.2.1");
  rep.equation = eq.str();
  rep.space = s.summary();
  rep.seed = seed;
  {
    std::ostringstream os;
    os << "q=" << q << " alpha=" << alpha;
    rep.note = os.str();
  }
  const double base = alpha == 1.0 ? double(q) : solve_a_q_alpha(q, alpha);
  const double logbase = std::log(base);
  rep.rows.assign(size_t(n_tuples), SweepRow{});
  parallel_for(n_tuples, workers, [&](int64_t i) {
    std::vector<Event> tuple;
    tuple.reserve(q);
    for (int j = 0; j < q; ++j) {
      RngStream rng(seed, uint64_t(i) * uint64_t(q) + uint64_t(j));
      tuple.push_back(sample_event(s, rng));
    }
    Functional f;
    f.kind = Functional::Kind::QPoint;
    for (int j = 1; j < q; ++j) f.helpers.push_back(&tuple[size_t(j)]);
    SweepRow& row = rep.rows[size_t(i)];
    row.t = logbase;
    double prod = 1.0;
    for (const auto& e : tuple) prod *= e.measure;
    row.pA = prod;
    row.lhs = exact_exp_moment(s, tuple[0], f, logbase);
    row.rhs = 1.0 / std::pow(prod, alpha);
  });
  finish_report(rep);
  return rep;
}

ExactCheckReport sweep_convex_moment(const ProductSpace& s, double coeff, double rhs_alpha,
                                     const EventSource& src, uint64_t seed, int workers,
                                     const std::string& equation) {
  return grid_sweep(s, equation, {coeff}, src, seed, workers,
                    [&](const Event& a, double c, SweepRow& row) {
                      Functional f;
                      f.kind = Functional::Kind::ConvexSq;
                      row.lhs = exact_exp_moment(s, a, f, c);
                      row.rhs = std::pow(a.measure, -rhs_alpha);
                    });
}

ExactCheckReport sweep_xi_moment(const ProductSpace& s, double alpha, const EventSource& src,
                                 uint64_t seed, int workers) {
  ExactCheckReport rep =
      grid_sweep(s, "4.2.5", {1.0}, src, seed, workers,
                 [&](const Event& a, double t, SweepRow& row) {
                   Functional f;
                   f.kind = Functional::Kind::XiPotential;
                   f.alpha = alpha;
                   row.lhs = exact_exp_moment(s, a, f, t);
                   row.rhs = std::pow(a.measure, -alpha);
                 });
  std::ostringstream os;
  os << (rep.note.empty() ? "" : rep.note + "; ") << "alpha=" << alpha;
  rep.note = os.str();
  return rep;
}

ExactCheckReport sweep_perm_moment(int n, int64_t n_events, uint64_t seed, int workers) {
  if (n < 1 || n > 8) throw std::invalid_argument("symmetric-group sweep supports n <= 8");
  std::vector<Permutation> sn;
  Permutation base(n);
  for (int i = 0; i < n; ++i) base[size_t(i)] = Symbol(i);
  do {
    sn.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  const int64_t m = int64_t(sn.size());

  ExactCheckReport rep;
  std::ostringstream eqname;
  eqname << "5.2";
  rep.equation = eqname.str();
  {
    std::ostringstream os;
    os << "S" << n;
    rep.space = os.str();
  }
  rep.seed = seed;
  rep.rows.assign(size_t(n_events), SweepRow{});
  parallel_for(n_events, workers, [&](int64_t e) {
    RngStream rng(seed, uint64_t(e));
    // same inclusion scheme as product-space event sampling
    static const double kProbs[3] = {0.125, 0.25, 0.5};
    std::vector<int> members;
    for (;;) {
      const double p = kProbs[rng.next_index(3)];
      members.clear();
      for (int64_t i = 0; i < m; ++i)
        if (rng.next_double() < p) members.push_back(int(i));
      if (!members.empty()) break;
    }
    std::vector<Permutation> a;
    a.reserve(members.size());
    for (int i : members) a.push_back(sn[size_t(i)]);
    const double pa = double(members.size()) / double(m);
    double sum = 0.0, comp = 0.0;
    for (int64_t i = 0; i < m; ++i) {
      const double fv = perm_convex_distance(a, sn[size_t(i)]).value;
      const double v = std::exp(fv / 16.0) / double(m) - comp;
      const double t2 = sum + v;
      comp = (t2 - sum) - v;
      sum = t2;
    }
    SweepRow& row = rep.rows[size_t(e)];
    row.pA = pa;
    row.t = 1.0 / 16.0;
    row.lhs = sum;
    row.rhs = 1.0 / pa;
  });
  finish_report(rep);
  return rep;
}

ExactCheckReport run_sweep(const std::string& equation, const SweepOptions& opt) {
  if (equation == "5.2") {
    // --space S<n>
    if (opt.space.size() < 2 || opt.space[0] != 'S')
      throw std::invalid_argument("5.2 needs --space S<n>, e.g. S4");
    const int n = std::stoi(opt.space.substr(1));
    int64_t count = 1000;
    if (opt.events.rfind("random:", 0) == 0) count = std::stoll(opt.events.substr(7));
    return sweep_perm_moment(n, count, opt.seed, opt.workers);
  }
  const ProductSpace s = space_from_shorthand(opt.space);
  EventSource src = EventSource::all();
  if (opt.events.rfind("random", 0) == 0) {
    const auto colon = opt.events.find(':');
    const int64_t n = colon == std::string::npos ? 2000 : std::stoll(opt.events.substr(colon + 1));
    src = EventSource::random(n);
  } else if (opt.events != "all") {
    throw std::invalid_argument("events must be 'all' or 'random:<n>'");
  }
  std::vector<double> grid = opt.t_grid;
  if (grid.empty()) grid = {0.25, 0.5, 1.0};

  if (equation == "2.1.2") return sweep_hamming_moment(s, grid, src, opt.seed, opt.workers);
  if (equation == "2.1.3") return sweep_hamming_tail(s, grid, src, opt.seed, opt.workers);
  if (equation == "2.3.1")
    return sweep_two_point_moment(s, opt.alpha, grid, src, opt.seed, opt.workers);
  if (equation == "2.3.7")
    return sweep_one_sided_moment(s, opt.p1, src, opt.seed, opt.workers);
  if (equation == "2.4.4" || equation == "2.4.13") {
    if (s.factors.empty()) throw std::invalid_argument("empty space");
    const PenaltyKernel kernel =
        indicator_kernel(s.factors[0].size(), s.factors[0], opt.penalty_c);
    if (equation == "2.4.4")
      return sweep_penalty_moment(s, kernel, grid, src, opt.seed, opt.workers);
    return sweep_penalty_tail(s, kernel, grid, src, opt.seed, opt.workers);
  }
  if (equation == "3.1.2")
    return sweep_q_point_moment(s, opt.q, 1.0, src.kind == EventSource::Kind::Random ? src.count : 2000,
                                opt.seed, opt.workers);
  if (equation == "3.2.1")
    return sweep_q_point_moment(s, opt.q, opt.alpha,
                                src.kind == EventSource::Kind::Random ? src.count : 2000,
                                opt.seed, opt.workers);
  if (equation == "4.1.2")
    return sweep_convex_moment(s, 0.25, 1.0, src, opt.seed, opt.workers, "4.1.2");
  if (equation == "4.2.5") return sweep_xi_moment(s, opt.alpha, src, opt.seed, opt.workers);
  if (equation == "4.3.7") {
    if (!s.is_uniform() || s.factors[0].size() != 2)
      throw std::invalid_argument("4.3.7 needs uniform two-point factors");
    return sweep_convex_moment(s, opt.alpha / (opt.alpha + 1.0), opt.alpha, src, opt.seed,
                               opt.workers, "4.3.7");
  }
  throw std::invalid_argument("no sweep driver for equation " + equation);
}

// ---------------------------------------------------------------------------

TailEstimate tail_from_values(const std::string& name, const std::vector<double>& values,
                              const std::vector<double>& u_grid, uint64_t seed,
                              Deviation dev) {
  TailEstimate est;
  est.statistic = name;
  est.n = int64_t(values.size());
  est.seed = seed;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const int64_t n = est.n;
  est.median = sorted[size_t((n + 1) / 2 - 1)];
  const auto [lo, hi] = median_ci_order_indices(n, 0.99);
  est.median_lo = sorted[size_t(lo - 1)];
  est.median_hi = sorted[size_t(hi - 1)];
  const double med = est.median;
  for (double u : u_grid) {
    TailRow row;
    row.u = u;
    row.n = n;
    int64_t count = 0;
    for (double v : values) {
      bool exceed = false;
      switch (dev) {
        case Deviation::Raw: exceed = v >= u; break;
        case Deviation::AbsFromMedian: exceed = std::fabs(v - med) >= u; break;
        case Deviation::AbsFromMedian1: exceed = std::fabs(v - med) >= 1.0 + u; break;
        case Deviation::UpperFromMedian: exceed = v >= med + u; break;
        case Deviation::LowerFromMedian: exceed = v <= med - u; break;
      }
      if (exceed) ++count;
    }
    row.count = count;
    row.point = double(count) / double(n);
    row.cp_upper = clopper_pearson_upper(count, n, 0.99);
    est.rows.push_back(row);
  }
  return est;
}

TailEstimate mc_tail(const std::string& name,
                     const std::function<double(RngStream&)>& statistic,
                     const std::vector<double>& u_grid, int64_t n, uint64_t seed,
                     int workers, Deviation dev) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> values(size_t(n), 0.0);
  parallel_for(n, workers, [&](int64_t i) {
    RngStream rng(seed, uint64_t(i));
    values[size_t(i)] = statistic(rng);
  });
  return tail_from_values(name, values, u_grid, seed, dev);
}

std::vector<BoundCompareRow> compare_tail_to_bound(
    const TailEstimate& est, const std::function<BoundValue(double)>& bound) {
  std::vector<BoundCompareRow> rows;
  rows.reserve(est.rows.size());
  for (const auto& r : est.rows) {
    BoundCompareRow out;
    out.u = r.u;
    out.cp_upper = r.cp_upper;
    const BoundValue b = bound(r.u);
    out.bound = b.value;
    out.note = b.note;
    out.vacuous = b.value >= 1.0;
    out.pass = out.vacuous || r.cp_upper <= b.value + 1e-12;
    rows.push_back(std::move(out));
  }
  return rows;
}

bool all_rows_pass(const std::vector<BoundCompareRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------

std::string TailEstimate::to_json() const {
  nlohmann::json j;
  j["statistic"] = statistic;
  j["n"] = n;
  j["seed"] = seed;
  j["median"] = median;
  j["median_ci"] = {median_lo, median_hi};
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"u", r.u}, {"count", r.count}, {"point", r.point},
                         {"cp_upper", r.cp_upper}});
  j["rows"] = std::move(rows_json);
  return j.dump();
}

std::string TailEstimate::to_csv() const {
  std::ostringstream os;
  os << "statistic,u,count,n,point,cp_upper\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%lld,%lld,%.17g,%.17g\n", statistic.c_str(),
                  r.u, (long long)r.count, (long long)r.n, r.point, r.cp_upper);
    os << buf;
  }
  return os.str();
}

std::string ExactCheckReport::to_json() const {
  nlohmann::json j;
  j["equation"] = equation;
  j["space"] = space;
  j["seed"] = seed;
  if (!note.empty()) j["note"] = note;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"pA", r.pA}, {"t", r.t}, {"lhs", r.lhs}, {"rhs", r.rhs},
                         {"slack", r.slack}});
  }
  j["rows"] = std::move(rows_json);
  j["counterexamples"] = counterexamples;
  j["verdict"] = pass() ? "pass" : "fail";
  return j.dump();
}

std::string ExactCheckReport::to_csv() const {
  std::ostringstream os;
  os << "equation,row,pA,t,lhs,rhs,slack,pass\n";
  char buf[512];
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool cex =
        std::find(counterexamples.begin(), counterexamples.end(), int64_t(i)) !=
        counterexamples.end();
    std::snprintf(buf, sizeof buf, "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                  equation.c_str(), i, r.pA, r.t, r.lhs, r.rhs, r.slack, cex ? 0 : 1);
    os << buf;
  }
  return os.str();
}

}  // namespace conclab
