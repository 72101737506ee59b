#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conclab/apps.hpp"
#include "conclab/stats.hpp"

namespace conclab {

FamilySpec FamilySpec::make(std::vector<std::vector<double>> alphas) {
  if (alphas.empty()) throw std::invalid_argument("family must be nonempty");
  const size_t n = alphas[0].size();
  FamilySpec f;
  for (const auto& a : alphas) {
    if (a.size() != n) throw std::invalid_argument("family dimension mismatch");
    double norm2 = 0.0;
    for (double v : a) {
      norm2 += v * v;
      f.tau = std::max(f.tau, std::fabs(v));
    }
    f.sigma = std::max(f.sigma, std::sqrt(norm2));
  }
  f.alphas = std::move(alphas);
  return f;
}

double supsum_statistic(const FamilySpec& family, const std::vector<double>& x) {
  if (x.size() != family.alphas[0].size())
    throw std::invalid_argument("dimension mismatch");
  double best = 0.0;
  bool first = true;
  for (const auto& a : family.alphas) {
    double dot = 0.0;
    for (size_t i = 0; i < x.size(); ++i) dot += a[i] * x[i];
    if (first || dot > best) {
      best = dot;
      first = false;
    }
  }
  return best;
}

AppReport supsum_experiment(const FamilySpec& family, const std::vector<double>& ranges,
                            int64_t samples, uint64_t seed,
                            const std::vector<double>& u_grid, int workers) {
  const size_t n = family.alphas[0].size();
  if (!ranges.empty() && ranges.size() != n)
    throw std::invalid_argument("ranges dimension mismatch");
  AppReport rep;
  rep.app = "supsum";
  rep.seed = seed;
  rep.params["N"] = std::to_string(n);
  rep.params["family_size"] = std::to_string(family.alphas.size());
  rep.params["samples"] = std::to_string(samples);

  TailEstimate est = mc_tail(
      "supsum",
      [&](RngStream& rng) {
        std::vector<double> x(n);
        for (size_t i = 0; i < n; ++i)
          x[i] = (ranges.empty() ? 0.0 : ranges[i]) + rng.next_double();
        return supsum_statistic(family, x);
      },
      u_grid, samples, seed, workers, Deviation::AbsFromMedian);

  const double s2 = family.sigma * family.sigma;
  AppSection sec;
  sec.name = "abs-deviation";
  sec.rows = compare_tail_to_bound(est, [&](double u) {
    BoundValue b;
    b.equation = "8.1.1";
    b.value = 4.0 * std::exp(-u * u / (4.0 * s2));
    return b;
  });
  sec.tail = std::move(est);
  rep.aux["sigma"] = family.sigma;
  rep.pass = all_rows_pass(sec.rows);
  rep.sections.push_back(std::move(sec));
  return rep;
}

AppReport supsum_perm_experiment(const FamilySpec& family, const std::vector<double>& avec,
                                 const std::string& variant, int64_t samples, uint64_t seed,
                                 const std::vector<double>& u_grid, int workers) {
  const size_t n = family.alphas[0].size();
  if (avec.size() != n) throw std::invalid_argument("a-vector dimension mismatch");
  double sum_a2 = 0.0;
  for (double a : avec) sum_a2 += a * a;
  if (variant == "13.17") {
    for (double a : avec)
      if (std::fabs(a) > 1.0 + 1e-12)
        throw std::invalid_argument("13.17 requires |a_i| <= 1");
  } else if (variant == "13.18") {
    if (family.tau > 1.0 + 1e-12)
      throw std::invalid_argument("13.18 requires coordinate magnitudes <= 1");
  } else {
    throw std::invalid_argument("variant must be 13.17 or 13.18");
  }

  AppReport rep;
  rep.app = "supsum-perm";
  rep.seed = seed;
  rep.params["N"] = std::to_string(n);
  rep.params["variant"] = variant;
  rep.params["samples"] = std::to_string(samples);

  TailEstimate est = mc_tail(
      "supsum-perm",
      [&](RngStream& rng) {
        // Fisher-Yates over the a-vector
        std::vector<double> permuted = avec;
        for (size_t i = n - 1; i > 0; --i) {
          const uint32_t j = rng.next_index(uint32_t(i + 1));
          std::swap(permuted[i], permuted[j]);
        }
        return supsum_statistic(family, permuted);
      },
      u_grid, samples, seed, workers, Deviation::AbsFromMedian);

  const double denom =
      variant == "13.17" ? 16.0 * family.sigma * family.sigma : 16.0 * sum_a2;
  AppSection sec;
  sec.name = "abs-deviation";
  sec.rows = compare_tail_to_bound(est, [&](double t) {
    BoundValue b;
    b.equation = variant;
    b.value = 4.0 * std::exp(-t * t / denom);
    return b;
  });
  sec.tail = std::move(est);
  rep.aux["sigma"] = family.sigma;
  rep.aux["sum_a2"] = sum_a2;
  rep.pass = all_rows_pass(sec.rows);
  rep.sections.push_back(std::move(sec));
  return rep;
}

AppReport supsum_qk_experiment(const FamilySpec& family, int64_t samples, uint64_t seed,
                               int q, const std::vector<int>& k_list, double a_quantile,
                               const std::vector<double>& t_grid, int workers) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const size_t n = family.alphas[0].size();
  const size_t kmax =
      size_t(*std::max_element(k_list.begin(), k_list.end()));
  if (kmax < 1 || kmax > n) throw std::invalid_argument("k out of range");

  AppReport rep;
  rep.app = "supsum-qk";
  rep.seed = seed;
  rep.params["N"] = std::to_string(n);
  rep.params["q"] = std::to_string(q);
  rep.params["samples"] = std::to_string(samples);
  {
    std::ostringstream os;
    os << a_quantile;
    rep.params["a_quantile"] = os.str();
  }

  // per trial: Z and tau * (sum of the j largest coordinates) for j <= kmax
  std::vector<double> z(size_t(samples), 0.0);
  std::vector<std::vector<double>> topk(kmax + 1,
                                        std::vector<double>(size_t(samples), 0.0));
  parallel_for(samples, workers, [&](int64_t i) {
    RngStream rng(seed, uint64_t(i));
    std::vector<double> x(n);
    for (size_t d = 0; d < n; ++d) x[d] = rng.next_double();
    z[size_t(i)] = supsum_statistic(family, x);
    std::sort(x.begin(), x.end(), std::greater<double>());
    double acc = 0.0;
    for (size_t j = 1; j <= kmax; ++j) {
      acc += x[j - 1];
      topk[j][size_t(i)] = family.tau * acc;
    }
  });

  std::vector<double> sorted_z = z;
  std::sort(sorted_z.begin(), sorted_z.end());
  const size_t a_idx =
      std::min(size_t(samples) - 1, size_t(std::floor(a_quantile * double(samples))));
  const double a = sorted_z[a_idx];
  int64_t below = 0;
  for (double v : z)
    if (v <= a) ++below;
  // CP lower bound for P(Z <= a): complement of the upper bound on misses
  const double p_below_lower =
      1.0 - clopper_pearson_upper(int64_t(samples) - below, int64_t(samples), 0.99);
  rep.aux["a"] = a;
  rep.aux["p_below_lower"] = p_below_lower;
  rep.aux["tau"] = family.tau;

  bool all_pass = true;
  for (int k : k_list) {
    TailEstimate lhs = tail_from_values("supsum-qk-lhs", z, t_grid, seed, Deviation::Raw);
    // reuse the rows but with the exceedance threshold q*a + t
    for (auto& row : lhs.rows) {
      int64_t count = 0;
      for (double v : z)
        if (v >= double(q) * a + row.u) ++count;
      row.count = count;
      row.point = double(count) / double(samples);
      row.cp_upper = clopper_pearson_upper(count, int64_t(samples), 0.99);
    }
    AppSection sec;
    std::ostringstream nm;
    nm << "k=" << k;
    sec.name = nm.str();
    const auto& tk = topk[size_t(k)];
    sec.rows = compare_tail_to_bound(lhs, [&](double t) {
      int64_t count = 0;
      for (double v : tk)
        if (v >= t) ++count;
      const double term2 = clopper_pearson_upper(count, int64_t(samples), 0.99);
      const double term1 =
          1.0 / (std::pow(double(q), double(k + 1)) * std::pow(p_below_lower, double(q)));
      BoundValue b;
      b.equation = "13.4";
      b.value = term1 + term2;
      b.note = "right-hand side estimated with CI slack";
      return b;
    });
    sec.tail = std::move(lhs);
    all_pass = all_pass && all_rows_pass(sec.rows);
    rep.sections.push_back(std::move(sec));
  }
  rep.pass = all_pass;
  return rep;
}

}  // namespace conclab
