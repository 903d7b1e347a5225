#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace jacres {

// One node of a weighted quadrature rule.
struct QuadNode {
  double x;
  double w;
};

// Gauss rule for the weight sqrt((x - alpha)(beta - x)) on [alpha, beta]
// (Chebyshev second kind, mapped). Integrates weight * poly(deg <= 2n-1) exactly:
//   integral_alpha^beta sqrt((x-alpha)(beta-x)) f(x) dx ~= sum w_i f(x_i).
inline std::vector<QuadNode> chebyshev_u_rule(double alpha, double beta, int n) {
  std::vector<QuadNode> rule(static_cast<size_t>(n));
  double mid = 0.5 * (alpha + beta);
  double half = 0.5 * (beta - alpha);
  for (int i = 1; i <= n; ++i) {
    double th = M_PI * static_cast<double>(i) / static_cast<double>(n + 1);
    double s = std::sin(th);
    rule[static_cast<size_t>(i - 1)] = {mid + half * std::cos(th),
                                        half * half * M_PI / static_cast<double>(n + 1) * s * s};
  }
  return rule;
}

// integral_alpha^beta sqrt((x-alpha)(beta-x)) f(x) dx with n nodes.
template <typename F>
double chebyshev_u_integral(double alpha, double beta, int n, F&& f) {
  double acc = 0.0;
  for (const QuadNode& q : chebyshev_u_rule(alpha, beta, n)) acc += q.w * f(q.x);
  return acc;
}

}  // namespace jacres
