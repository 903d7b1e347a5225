#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "jacres/errors.hpp"

namespace jacres {

using cdouble = std::complex<double>;

// Dense real polynomial, coefficients ascending: c[0] + c[1] z + ...
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  static Poly constant(double v) { return Poly({v}); }

  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }

  // Degree after ignoring an exactly-zero leading tail; -1 for the zero polynomial.
  int degree() const {
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
      if (c_[static_cast<size_t>(i)] != 0.0) return i;
    return -1;
  }

  double operator()(double x) const {
    double v = 0.0;
    for (size_t i = c_.size(); i-- > 0;) v = v * x + c_[i];
    return v;
  }

  cdouble operator()(cdouble z) const {
    cdouble v = 0.0;
    for (size_t i = c_.size(); i-- > 0;) v = v * z + c_[i];
    return v;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly({0.0});
    std::vector<double> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
    return Poly(std::move(d));
  }

  // Drops leading coefficients below rel_eps * max|c|.
  Poly trimmed(double rel_eps = 0.0) const {
    double scale = 0.0;
    for (double v : c_) scale = std::max(scale, std::abs(v));
    std::vector<double> out = c_;
    while (out.size() > 1 && std::abs(out.back()) <= rel_eps * scale) out.pop_back();
    return Poly(std::move(out));
  }

  double max_abs_coeff() const {
    double scale = 0.0;
    for (double v : c_) scale = std::max(scale, std::abs(v));
    return scale;
  }

  Poly& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }

 private:
  std::vector<double> c_;
};

inline Poly operator*(const Poly& f, double s) {
  Poly g = f;
  g *= s;
  return g;
}
inline Poly operator*(double s, const Poly& f) { return f * s; }

inline Poly operator+(const Poly& f, const Poly& g) {
  std::vector<double> c(std::max(f.coeffs().size(), g.coeffs().size()), 0.0);
  for (size_t i = 0; i < f.coeffs().size(); ++i) c[i] += f.coeffs()[i];
  for (size_t i = 0; i < g.coeffs().size(); ++i) c[i] += g.coeffs()[i];
  return Poly(std::move(c));
}

inline Poly operator-(const Poly& f, const Poly& g) {
  std::vector<double> c(std::max(f.coeffs().size(), g.coeffs().size()), 0.0);
  for (size_t i = 0; i < f.coeffs().size(); ++i) c[i] += f.coeffs()[i];
  for (size_t i = 0; i < g.coeffs().size(); ++i) c[i] -= g.coeffs()[i];
  return Poly(std::move(c));
}

inline Poly operator*(const Poly& f, const Poly& g) {
  if (f.coeffs().empty() || g.coeffs().empty()) return Poly({0.0});
  std::vector<double> c(f.coeffs().size() + g.coeffs().size() - 1, 0.0);
  for (size_t i = 0; i < f.coeffs().size(); ++i)
    for (size_t j = 0; j < g.coeffs().size(); ++j) c[i + j] += f.coeffs()[i] * g.coeffs()[j];
  return Poly(std::move(c));
}

namespace detail {

inline cdouble horner(const std::vector<cdouble>& c, cdouble z) {
  cdouble v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * z + c[i];
  return v;
}

}  // namespace detail

// Simultaneous root finding (Aberth-Ehrlich), tolerance on the root update.
// Returns all complex roots of f, multiplicity repeated. Degree 0 gives {}.
inline std::vector<cdouble> roots(const Poly& f, double tol = 1e-12, int max_iter = 200) {
  Poly g = f.trimmed();
  int n = g.degree();
  if (n <= 0) return {};
  const std::vector<double>& c = g.coeffs();

  // Exact zeros at the origin are deflated up front.
  std::vector<cdouble> out;
  size_t shift = 0;
  while (shift < static_cast<size_t>(n) && c[shift] == 0.0) ++shift;
  std::vector<double> cc(c.begin() + static_cast<long>(shift), c.begin() + n + 1);
  for (size_t i = 0; i < shift; ++i) out.emplace_back(0.0, 0.0);
  int m = static_cast<int>(cc.size()) - 1;

  if (m == 1) {
    out.emplace_back(-cc[0] / cc[1], 0.0);
    return out;
  }
  if (m == 2) {
    // Stable quadratic formula.
    double a = cc[2], b = cc[1], c0 = cc[0];
    cdouble disc = std::sqrt(cdouble(b * b - 4.0 * a * c0, 0.0));
    cdouble q = (b >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (std::abs(q) > 0.0) {
      out.push_back(q / a);
      out.push_back(c0 / q);
    } else {
      out.emplace_back(0.0, 0.0);
      out.emplace_back(0.0, 0.0);
    }
    return out;
  }

  // Cauchy bound initial ring with an irrational twist to avoid symmetry traps.
  double bound = 0.0;
  for (int i = 0; i < m; ++i) bound = std::max(bound, std::abs(cc[static_cast<size_t>(i)] / cc[static_cast<size_t>(m)]));
  double radius = 1.0 + bound;
  std::vector<cdouble> z(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    double th = 2.0 * M_PI * (static_cast<double>(i) + 0.35) / static_cast<double>(m) + 0.42;
    z[static_cast<size_t>(i)] = 0.7 * radius * cdouble(std::cos(th), std::sin(th));
  }

  std::vector<cdouble> ccx(cc.begin(), cc.end());
  std::vector<cdouble> dcx(static_cast<size_t>(m));
  for (int i = 1; i <= m; ++i) dcx[static_cast<size_t>(i - 1)] = cc[static_cast<size_t>(i)] * static_cast<double>(i);

  for (int iter = 0; iter < max_iter; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      cdouble zi = z[static_cast<size_t>(i)];
      cdouble p = detail::horner(ccx, zi);
      cdouble dp = detail::horner(dcx, zi);
      cdouble w = (dp != cdouble(0.0)) ? p / dp : cdouble(tol, tol);
      cdouble s = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != i) s += 1.0 / (zi - z[static_cast<size_t>(j)]);
      cdouble denom = 1.0 - w * s;
      cdouble step = (std::abs(denom) > 1e-300) ? w / denom : w;
      z[static_cast<size_t>(i)] = zi - step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(zi)));
    }
    if (worst < tol) break;
  }

  out.insert(out.end(), z.begin(), z.end());
  return out;
}

// Root cluster: representative location plus multiplicity.
struct RootCluster {
  cdouble z;
  int mult = 1;
};

// Greedy clustering of numerically coincident roots within the given radius.
inline std::vector<RootCluster> cluster_roots(std::vector<cdouble> rts, double radius) {
  std::vector<RootCluster> clusters;
  std::sort(rts.begin(), rts.end(), [](cdouble a, cdouble b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  std::vector<bool> used(rts.size(), false);
  for (size_t i = 0; i < rts.size(); ++i) {
    if (used[i]) continue;
    cdouble sum = rts[i];
    int count = 1;
    used[i] = true;
    for (size_t j = i + 1; j < rts.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(rts[j] - sum / static_cast<double>(count)) <= radius) {
        sum += rts[j];
        ++count;
        used[j] = true;
      }
    }
    clusters.push_back({sum / static_cast<double>(count), count});
  }
  return clusters;
}

// Roots with |Im| below the tolerance are snapped onto the real axis.
inline void snap_real(std::vector<cdouble>& rts, double im_tol = 1e-9) {
  for (cdouble& z : rts)
    if (std::abs(z.imag()) < im_tol) z = cdouble(z.real(), 0.0);
}

// Monic real polynomial with the prescribed complex roots; conjugate pairs are
// combined into exact real quadratic factors, lone imaginary parts are an error.
inline Poly poly_from_roots(std::vector<cdouble> rts, double pair_tol = 1e-9) {
  Poly f({1.0});
  std::vector<bool> used(rts.size(), false);
  for (size_t i = 0; i < rts.size(); ++i) {
    if (used[i]) continue;
    if (std::abs(rts[i].imag()) <= pair_tol) {
      f = f * Poly({-rts[i].real(), 1.0});
      used[i] = true;
      continue;
    }
    bool paired = false;
    for (size_t j = i + 1; j < rts.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(rts[j] - std::conj(rts[i])) <= pair_tol * std::max(1.0, std::abs(rts[i]))) {
        double re = rts[i].real(), n2 = std::norm(rts[i]);
        f = f * Poly({n2, -2.0 * re, 1.0});
        used[i] = used[j] = true;
        paired = true;
        break;
      }
    }
    if (!paired) throw Error(ErrorCode::BadInput, "complex root without conjugate partner");
  }
  return f;
}

}  // namespace jacres
