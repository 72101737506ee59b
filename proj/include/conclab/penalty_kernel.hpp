#pragma once

#include <vector>

#include "conclab/spaces.hpp"

namespace conclab {

// Nonnegative penalty matrix h over a shared finite alphabet, zero on the
// diagonal. norm2 is the root mean square under mu (x) mu and norm_inf the
// largest entry; both are cached together with the weights they were
// computed against.
struct PenaltyKernel {
  int alphabet = 0;
  std::vector<double> h;   // row-major alphabet x alphabet
  std::vector<double> mu;  // weights the cached norms refer to
  double norm2 = 0.0;
  double norm_inf = 0.0;

  double at(int a, int b) const { return h[size_t(a) * alphabet + b]; }
};

PenaltyKernel make_kernel(int alphabet, std::vector<double> h, const FiniteSpace& mu);

// 0/1 kernel: penalty 1 whenever the symbols differ
PenaltyKernel indicator_kernel(int alphabet, const FiniteSpace& mu, double scale = 1.0);

// integral of exp(h) under mu (x) mu
double kernel_exp_integral(const PenaltyKernel& k);

}  // namespace conclab
