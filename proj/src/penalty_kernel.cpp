#include "conclab/penalty_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace conclab {

PenaltyKernel make_kernel(int alphabet, std::vector<double> h, const FiniteSpace& mu) {
  if (alphabet < 1 || h.size() != size_t(alphabet) * alphabet)
    throw std::invalid_argument("kernel shape mismatch");
  if (mu.size() != alphabet) throw std::invalid_argument("kernel/measure alphabet mismatch");
  PenaltyKernel k;
  k.alphabet = alphabet;
  k.h = std::move(h);
  k.mu = mu.weights;
  for (int a = 0; a < alphabet; ++a) {
    if (k.at(a, a) != 0.0) throw std::invalid_argument("kernel diagonal must be zero");
    for (int b = 0; b < alphabet; ++b) {
      if (k.at(a, b) < 0.0) throw std::invalid_argument("kernel must be nonnegative");
      k.norm_inf = std::max(k.norm_inf, k.at(a, b));
    }
  }
  double ms = 0.0;
  for (int a = 0; a < alphabet; ++a)
    for (int b = 0; b < alphabet; ++b)
      ms += k.mu[a] * k.mu[b] * k.at(a, b) * k.at(a, b);
  k.norm2 = std::sqrt(ms);
  return k;
}

PenaltyKernel indicator_kernel(int alphabet, const FiniteSpace& mu, double scale) {
  std::vector<double> h(size_t(alphabet) * alphabet, scale);
  for (int a = 0; a < alphabet; ++a) h[size_t(a) * alphabet + a] = 0.0;
  return make_kernel(alphabet, std::move(h), mu);
}

double kernel_exp_integral(const PenaltyKernel& k) {
  double s = 0.0;
  for (int a = 0; a < k.alphabet; ++a)
    for (int b = 0; b < k.alphabet; ++b)
      s += k.mu[a] * k.mu[b] * std::exp(k.at(a, b));
  return s;
}

}  // namespace conclab
