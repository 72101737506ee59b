#include "conclab/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "conclab/penalty_kernel.hpp"

namespace conclab {

namespace {

std::string fmt_params(const BoundQuery& q) {
  std::ostringstream os;
  os << "N=" << q.N << " pA=" << q.pA;
  if (q.t > 0) os << " t=" << q.t;
  if (q.k >= 0) os << " k=" << q.k;
  if (q.u >= 0) os << " u=" << q.u;
  os << " alpha=" << q.alpha;
  return os.str();
}

void check_pA(const BoundQuery& q) {
  if (!(q.pA > 0.0 && q.pA <= 1.0)) throw std::invalid_argument("pA must be in (0,1]");
}

double sum_sq(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace

double a_of_t(double t) {
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  return 0.5 + (std::exp(t) + std::exp(-t)) / 4.0;
}

double two_point_b(double alpha, double t, double p) {
  if (alpha < 1.0) throw std::invalid_argument("alpha must be >= 1");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  if (p < 0.5) p = 1.0 - p;
  return ((1.0 - p) * std::exp(t) + p) *
         std::pow(p + (1.0 - p) * std::exp(-t / alpha), alpha);
}

double solve_a_q_alpha(double q, double alpha) {
  if (q < 2.0 || alpha < 1.0) throw std::invalid_argument("need q >= 2, alpha >= 1");
  const double target = 1.0 + q * alpha;
  auto residual = [&](double x) { return x + q * alpha * std::pow(x, -1.0 / alpha) - target; };
  double lo = 1.0 + 1e-9, hi = target;
  // residual is negative just above 1 and positive at 1+q*alpha
  if (!(residual(lo) < 0.0 && residual(hi) > 0.0))
    throw std::logic_error("root bracket failed");
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double xi(double alpha, double u) {
  if (alpha < 1.0) throw std::invalid_argument("alpha must be >= 1");
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("u must be in [0,1]");
  const double om = 1.0 - u;
  // (1-u)log(1-u) -> 0 as u -> 1
  const double first = om < 1e-15 ? 0.0 : alpha * om * std::log(om);
  return first - (alpha + 1.0 - alpha * u) *
                     std::log((1.0 + alpha - alpha * u) / (1.0 + alpha));
}

double xi_du(double alpha, double u) {
  const double om = 1.0 - u;
  if (om <= 0.0) throw std::domain_error("xi_du diverges at u=1");
  return alpha * std::log((1.0 + alpha - alpha * u) / ((1.0 + alpha) * om));
}

double one_sided_moment_base(double p, double p1) {
  if (!(p > 0.0 && p1 < 1.0 && p < p1)) throw std::invalid_argument("need 0 < p < p1 < 1");
  return p1 * (1.0 - p) / (p * (1.0 - p1));
}

BoundValue hamming_moment(const BoundQuery& q) {
  check_pA(q);
  BoundValue b;
  b.params = fmt_params(q);
  if (q.profile.empty()) {
    b.equation = "2.1.2";
    b.value = std::pow(a_of_t(q.t), double(q.N)) / q.pA;
  } else {
    b.equation = "2.1.8";
    b.value = std::exp(q.t * q.t * sum_sq(q.profile) / 4.0) / q.pA;
  }
  return b;
}

BoundValue hamming_tail(const BoundQuery& q) {
  check_pA(q);
  BoundValue b;
  b.params = fmt_params(q);
  if (q.profile.empty()) {
    if (q.k < 0) throw std::invalid_argument("k required");
    b.equation = "2.1.3";
    b.value = std::exp(-q.k * q.k / double(q.N)) / q.pA;
  } else {
    if (q.u < 0) throw std::invalid_argument("u required");
    b.equation = "2.1.9";
    b.value = std::exp(-q.u * q.u / sum_sq(q.profile)) / q.pA;
  }
  if (b.value >= 1.0) b.note = "vacuous";
  return b;
}

BoundValue sharpened_tail(const BoundQuery& q) {
  check_pA(q);
  if (q.k < 0) throw std::invalid_argument("k required");
  BoundValue b;
  b.equation = "2.2.7";
  const double logInv = std::log(1.0 / q.pA);
  const double threshold = std::sqrt(double(q.N) / 2.0 * logInv);
  const double d = q.k - threshold;
  b.value = std::exp(-2.0 / double(q.N) * d * d);
  const double alpha_opt =
      logInv > 0 ? -1.0 + std::sqrt(2.0 * q.k * q.k / (double(q.N) * logInv))
                 : std::numeric_limits<double>::infinity();
  std::ostringstream os;
  os << fmt_params(q) << " alpha_opt=" << alpha_opt;
  b.params = os.str();
  if (q.k < threshold) {
    std::ostringstream note;
    note << "out of stated range: requires k >= sqrt(N/2 log 1/P(A)) = " << threshold;
    b.note = note.str();
  }
  return b;
}

BoundValue two_point_tail(const BoundQuery& q) {
  check_pA(q);
  if (q.k < 0) throw std::invalid_argument("k required");
  if (!(q.p > 0.0 && q.p < 1.0)) throw std::invalid_argument("p must be in (0,1)");
  BoundValue b;
  b.equation = "2.3.5";
  b.params = fmt_params(q);
  const double pq = q.p * (1.0 - q.p);
  const double logInv = std::log(1.0 / q.pA);
  const double lo = std::sqrt(4.0 * pq * double(q.N) * logInv);
  const double hi = pq * double(q.N);
  const double d = q.k - std::sqrt(2.0 * pq * double(q.N) * logInv);
  const double lead = -d * d / (2.0 * pq * double(q.N));
  const double cubic = q.K * q.k * q.k * q.k / (pq * pq * pq * double(q.N) * double(q.N));
  b.value = std::exp(lead + cubic);
  std::string note;
  if (q.K == 0.0) note = "leading term only (K=0)";
  if (q.k < lo || q.k > hi) {
    if (!note.empty()) note += "; ";
    note += "out of stated range";
  }
  b.note = note;
  return b;
}

BoundValue q_point_tail(const BoundQuery& q, const std::string& variant) {
  check_pA(q);
  if (q.q < 2.0) throw std::invalid_argument("q must be >= 2");
  if (q.k < 0) throw std::invalid_argument("k required");
  BoundValue b;
  b.params = fmt_params(q);
  if (variant == "basic") {
    b.equation = "3.1.3";
    b.value = std::pow(q.q, -q.k) * std::pow(q.pA, -q.q);
  } else if (variant == "sharpened") {
    b.equation = "3.2.3";
    // geometric alpha grid with golden-section refinement around the best cell
    auto objective = [&](double alpha) {
      const double a = solve_a_q_alpha(q.q, alpha);
      return -q.k * std::log(a) + q.q * alpha * std::log(1.0 / q.pA);
    };
    double best = objective(1.0), best_alpha = 1.0;
    for (int j = 1; j <= 80; ++j) {
      const double alpha = std::pow(2.0, j / 8.0);
      const double v = objective(alpha);
      if (v < best) {
        best = v;
        best_alpha = alpha;
      }
    }
    double lo = std::max(1.0, best_alpha / std::pow(2.0, 1.0 / 8.0));
    double hi = best_alpha * std::pow(2.0, 1.0 / 8.0);
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = objective(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = objective(x2);
      }
    }
    b.value = std::exp(std::min(best, std::min(f1, f2)));
  } else if (variant == "large-q") {
    b.equation = "3.2.4";
    const double lq = std::log(q.q);
    b.value = std::pow(std::exp(1.0) / ((std::exp(1.0) - 1.0) * q.q * lq), q.k) *
              std::pow(1.0 / q.pA, q.q * lq);
    std::ostringstream note;
    note << "valid for q >= q0; q0=" << q.q0 << " is a guess, the constant is unspecified";
    b.note = note.str();
    if (q.q < q.q0) b.note += "; q below declared q0";
    return b;
  } else {
    throw std::invalid_argument("unknown q_point_tail variant: " + variant);
  }
  if (b.value >= 1.0) b.note = "vacuous";
  return b;
}

BoundValue convex_tail(const BoundQuery& q, const std::string& variant) {
  check_pA(q);
  if (q.t < 0) throw std::invalid_argument("t must be >= 0");
  BoundValue b;
  b.params = fmt_params(q);
  const double logInv = std::log(1.0 / q.pA);
  if (variant == "basic") {
    b.equation = "4.1.3";
    b.value = std::exp(-q.t * q.t / 4.0) / q.pA;
  } else if (variant == "alpha") {
    b.equation = "4.2.6";
    b.value = std::pow(q.pA, -q.alpha) *
              std::exp(-q.alpha * q.t * q.t / (2.0 * (q.alpha + 1.0)));
  } else if (variant == "optimized") {
    b.equation = "4.2.7";
    const double thr = std::sqrt(2.0 * logInv);
    b.value = std::exp(-0.5 * (q.t - thr) * (q.t - thr));
    if (q.t < thr) b.note = "out of stated range: requires t >= sqrt(2 log 1/P(A))";
  } else if (variant == "two-point-uniform") {
    b.equation = "4.3.7";
    b.value = std::pow(q.pA, -q.alpha) *
              std::exp(-q.alpha * q.t * q.t / (q.alpha + 1.0));
  } else if (variant == "two-point-uniform-optimized") {
    b.equation = "4.3.8";
    const double thr = std::sqrt(logInv);
    b.value = std::exp(-(q.t - thr) * (q.t - thr));
    if (q.t < thr) b.note = "out of stated range: requires t >= sqrt(log 1/P(A))";
  } else {
    throw std::invalid_argument("unknown convex_tail variant: " + variant);
  }
  if (b.value >= 1.0 && b.note.empty()) b.note = "vacuous";
  return b;
}

std::vector<BoundValue> penalty_bounds(const BoundQuery& q, const PenaltyKernel& kernel) {
  check_pA(q);
  std::vector<BoundValue> out;

  {
    // exact RHS of the moment bound at t
    BoundValue b;
    b.equation = "2.4.4";
    b.params = fmt_params(q);
    double inner = 0.0;
    for (int a = 0; a < kernel.alphabet; ++a)
      for (int c = 0; c < kernel.alphabet; ++c) {
        const double v = std::max(kernel.at(a, c), kernel.at(c, a));
        inner += kernel.mu[a] * kernel.mu[c] * 0.5 *
                 (std::exp(q.t * v) + std::exp(-q.t * v));
      }
    b.value = std::pow(inner, double(q.N)) / q.pA;
    out.push_back(std::move(b));
  }

  if (q.u >= 0) {
    const double integral = kernel_exp_integral(kernel);
    if (integral > 2.0 + 1e-12) {
      std::ostringstream msg;
      msg << "integrability precondition fails: integral of exp(h) = " << integral
          << " > 2";
      throw std::runtime_error(msg.str());
    }
    BoundValue b;
    b.equation = "2.4.13";
    b.params = fmt_params(q);
    b.value = std::exp(-q.u * q.u / (4.0 * double(q.N))) / q.pA;
    if (q.u > 2.0 * double(q.N)) b.note = "out of stated range: requires u <= 2N";
    else if (b.value >= 1.0) b.note = "vacuous";
    out.push_back(std::move(b));

    BoundValue c;
    c.equation = "2.4.14";
    c.params = fmt_params(q);
    const double n2 = kernel.norm2, ni = kernel.norm_inf;
    const double e1 = n2 > 0 ? q.u * q.u / (8.0 * double(q.N) * n2 * n2)
                             : std::numeric_limits<double>::infinity();
    const double e2 = ni > 0 ? q.u / (2.0 * ni) : std::numeric_limits<double>::infinity();
    c.value = std::exp(-std::min(e1, e2)) / q.pA;
    if (c.value >= 1.0) c.note = "vacuous";
    out.push_back(std::move(c));
  }
  return out;
}

BoundValue evaluate_bound(const std::string& eq, const BoundQuery& q) {
  if (eq == "2.1.2" || eq == "2.1.8") return hamming_moment(q);
  if (eq == "2.1.3" || eq == "2.1.9") return hamming_tail(q);
  if (eq == "2.2.7") return sharpened_tail(q);
  if (eq == "2.3.2") {
    BoundValue b;
    b.equation = "2.3.2";
    b.params = fmt_params(q);
    b.value = two_point_b(q.alpha, q.t, q.p);
    return b;
  }
  if (eq == "2.3.5") return two_point_tail(q);
  if (eq == "2.3.7") {
    BoundValue b;
    b.equation = "2.3.7";
    b.params = fmt_params(q);
    b.value = one_sided_moment_base(q.p, q.p1);
    b.note = "moment base; integral bound is 1/P1(A)";
    return b;
  }
  if (eq == "3.1.3") return q_point_tail(q, "basic");
  if (eq == "3.2.2") {
    BoundValue b;
    b.equation = "3.2.2";
    b.params = fmt_params(q);
    b.value = solve_a_q_alpha(q.q, q.alpha);
    return b;
  }
  if (eq == "3.2.3") return q_point_tail(q, "sharpened");
  if (eq == "3.2.4") return q_point_tail(q, "large-q");
  if (eq == "4.2.1") {
    BoundValue b;
    b.equation = "4.2.1";
    b.params = fmt_params(q);
    b.value = xi(q.alpha, q.u);
    return b;
  }
  if (eq == "4.1.3") return convex_tail(q, "basic");
  if (eq == "4.2.6") return convex_tail(q, "alpha");
  if (eq == "4.2.7") return convex_tail(q, "optimized");
  if (eq == "4.3.7") return convex_tail(q, "two-point-uniform");
  if (eq == "4.3.8") return convex_tail(q, "two-point-uniform-optimized");
  throw std::invalid_argument("unknown equation id: " + eq);
}

}  // namespace conclab
