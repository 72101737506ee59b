#pragma once

#include <string>
#include <vector>

namespace conclab {

struct PenaltyKernel;

// a(t) = 1/2 + (e^t + e^-t)/4
double a_of_t(double t);

// two-point base b(alpha,t,p); symmetric in p <-> 1-p
double two_point_b(double alpha, double t, double p);

// unique root x > 1 of x + q*alpha*x^(-1/alpha) = 1 + q*alpha
double solve_a_q_alpha(double q, double alpha);

// xi(alpha,u) = alpha(1-u)log(1-u) - (alpha+1-alpha*u)*log((1+alpha-alpha*u)/(1+alpha))
double xi(double alpha, double u);
// d(xi)/du; diverges as u -> 1
double xi_du(double alpha, double u);

// base of the dimension-free one-sided moment: p1(1-p)/(p(1-p1)), 0 < p < p1 < 1
double one_sided_moment_base(double p, double p1);

struct BoundValue {
  std::string equation;
  std::string params;  // compact key=value snapshot of the query
  double value = 0.0;
  std::string note;  // validity / vacuousness remarks; empty when unrestricted
};

struct BoundQuery {
  long N = 0;
  double pA = 1.0;
  double t = 0.0;
  double k = -1.0;
  double u = -1.0;
  double alpha = 1.0;
  double q = 2.0;
  double p = 0.5;
  double p1 = 0.5;
  double K = 0.0;    // free constant of 2.3.5 (default 0: leading term only)
  double q0 = 64.0;  // declared large-q threshold for 3.2.4 (a guess, noted)
  double Kfree = 1.0;  // free constant of 8.3.1 / 12.3
  std::vector<double> profile;  // weighted variants use this when nonempty
};

// exponential-moment bounds 2.1.2 / 2.1.8
BoundValue hamming_moment(const BoundQuery& q);
// tail bounds 2.1.3 / 2.1.9
BoundValue hamming_tail(const BoundQuery& q);
// 2.2.7; params carry the optimizing alpha
BoundValue sharpened_tail(const BoundQuery& q);
// 2.3.5 with caller-supplied K
BoundValue two_point_tail(const BoundQuery& q);
// 3.1.3 ("basic"), 3.2.3 ("sharpened"), 3.2.4 ("large-q")
BoundValue q_point_tail(const BoundQuery& q, const std::string& variant);
// 4.1.3 ("basic"), 4.2.6 ("alpha"), 4.2.7 ("optimized"),
// 4.3.7 ("two-point-uniform"), 4.3.8 ("two-point-uniform-optimized")
BoundValue convex_tail(const BoundQuery& q, const std::string& variant);

// Penalty-kernel bounds. "2.4.4" is the exact finite-alphabet evaluation of
// the moment bound right-hand side at q.t (with v = max(h(w,w'),h(w',w)));
// "2.4.13" is (1/pA)e^{-u^2/4N} under the integrability precondition
// (exp-integral <= 2, checked; violation throws naming the integral);
// "2.4.14" is the Bernstein-like form built from the cached kernel norms.
std::vector<BoundValue> penalty_bounds(const BoundQuery& q, const PenaltyKernel& kernel);

// dispatcher keyed by equation id; used by the CLI and the sweep engine
BoundValue evaluate_bound(const std::string& equation, const BoundQuery& q);

}  // namespace conclab
