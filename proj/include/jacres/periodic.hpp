#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include "jacres/errors.hpp"
#include "jacres/poly.hpp"

namespace jacres {

// One period of Jacobi coefficients: a_1..a_p (offdiagonal, positive) and
// b_1..b_p (diagonal). The block describes the p-periodic two-sided extension.
struct PeriodicBlock {
  std::vector<double> a;
  std::vector<double> b;

  int p() const { return static_cast<int>(a.size()); }

  void check() const {
    if (a.empty() || a.size() != b.size())
      throw Error(ErrorCode::BadInput, "periodic block needs equal, nonempty a and b lists");
    for (double v : a)
      if (!(v > 0.0)) throw Error(ErrorCode::BadInput, "offdiagonal entries must be positive");
  }

  double a_prod() const {
    double r = 1.0;
    for (double v : a) r *= v;
    return r;
  }
};

inline PeriodicBlock free_block() { return {{1.0}, {0.0}}; }

// Cyclic shift by one position: (a_2..a_p,a_1), (b_2..b_p,b_1).
inline PeriodicBlock rotate_block(const PeriodicBlock& blk) {
  PeriodicBlock out = blk;
  std::rotate(out.a.begin(), out.a.begin() + 1, out.a.end());
  std::rotate(out.b.begin(), out.b.begin() + 1, out.b.end());
  return out;
}

namespace detail {

struct PolyMat2 {
  Poly e[2][2];

  static PolyMat2 identity() {
    PolyMat2 m;
    m.e[0][0] = Poly({1.0});
    m.e[0][1] = Poly({0.0});
    m.e[1][0] = Poly({0.0});
    m.e[1][1] = Poly({1.0});
    return m;
  }
};

inline PolyMat2 operator*(const PolyMat2& x, const PolyMat2& y) {
  PolyMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.e[i][j] = x.e[i][0] * y.e[0][j] + x.e[i][1] * y.e[1][j];
  return r;
}

}  // namespace detail

// Trace of the one-period transfer matrix: the polynomial Delta with
// Delta^{-1}([-2,2]) equal to the essential spectrum. deg Delta = p, leading
// coefficient 1/(a_1...a_p).
inline Poly discriminant(const PeriodicBlock& blk) {
  blk.check();
  int p = blk.p();
  detail::PolyMat2 t = detail::PolyMat2::identity();
  for (int j = 1; j <= p; ++j) {
    double aj = blk.a[static_cast<size_t>(j - 1)];
    double bj = blk.b[static_cast<size_t>(j - 1)];
    double aprev = (j == 1) ? blk.a[static_cast<size_t>(p - 1)] : blk.a[static_cast<size_t>(j - 2)];
    detail::PolyMat2 step;
    step.e[0][0] = Poly({-bj / aj, 1.0 / aj});
    step.e[0][1] = Poly({-aprev / aj});
    step.e[1][0] = Poly({1.0});
    step.e[1][1] = Poly({0.0});
    t = step * t;
  }
  return t.e[0][0] + t.e[1][1];
}

// Band endpoints of Delta^{-1}([-2,2]), ascending. Size is 2p, bands are
// [edges[2k], edges[2k+1]]; all gaps are required to be open.
struct BandSet {
  std::vector<double> edges;

  int p() const { return static_cast<int>(edges.size()) / 2; }

  std::pair<double, double> band(int k) const {  // k in 1..p
    return {edges[static_cast<size_t>(2 * k - 2)], edges[static_cast<size_t>(2 * k - 1)]};
  }
  std::pair<double, double> gap(int k) const {  // k in 1..p-1
    return {edges[static_cast<size_t>(2 * k - 1)], edges[static_cast<size_t>(2 * k)]};
  }

  bool contains(double x, double tol = 0.0) const {
    for (int k = 1; k <= p(); ++k) {
      auto [al, be] = band(k);
      if (x >= al - tol && x <= be + tol) return true;
    }
    return false;
  }

  // Strictly inside an open band.
  bool interior(double x) const {
    for (int k = 1; k <= p(); ++k) {
      auto [al, be] = band(k);
      if (x > al && x < be) return true;
    }
    return false;
  }

  double edge_distance(cdouble z) const {
    double d = std::numeric_limits<double>::infinity();
    for (double e : edges) d = std::min(d, std::abs(z - e));
    return d;
  }

  // Sign of a(x) on band k (1-based): alternates, +1 on the last band.
  double band_sign(int k) const { return ((p() - k) % 2 == 0) ? 1.0 : -1.0; }

  // r(z) = prod (z - e_j); positive on the real line off the bands.
  cdouble r(cdouble z) const {
    cdouble v = 1.0;
    for (double e : edges) v *= (z - e);
    return v;
  }

  double r(double x) const {
    double v = 1.0;
    for (double e : edges) v *= (x - e);
    return v;
  }

  // sqrt(|r(x)|), the magnitude used in densities and canonical weights.
  double sqrt_abs_r(double x) const { return std::sqrt(std::abs(r(x))); }

  // Branch of sqrt(r) cut along the bands, positive on (beta_p, inf). Product
  // of principal square roots; real points are lifted with +0 imaginary part
  // so gap values continue the branch from the upper half plane.
  cdouble sqrt_r(cdouble z) const {
    cdouble v = 1.0;
    for (double e : edges) {
      cdouble d = z - e;
      if (d.imag() == 0.0) d = cdouble(d.real(), 0.0);
      v *= std::sqrt(d);
    }
    return v;
  }

  // sqrt(|r(x)| / ((x-alpha_k)(beta_k-x))) for x on band k: the factor left
  // after splitting off the built-in Chebyshev weight of that band.
  double sqrt_abs_r_reduced(int k, double x) const {
    double v = 1.0;
    for (int j = 1; j <= p(); ++j) {
      if (j == k) continue;
      auto [al, be] = band(j);
      v *= std::abs((x - al) * (x - be));
    }
    return std::sqrt(v);
  }
};

// Solves Delta = +-2. Multiple roots (within 1e-8) mean a closed gap; roots
// off the real axis mean the polynomial is not a discriminant.
inline BandSet band_set(const Poly& delta) {
  Poly d = delta.trimmed(1e-14);
  int p = d.degree();
  if (p < 1) throw Error(ErrorCode::BadInput, "discriminant must have degree >= 1");

  std::vector<double> edges;
  for (double shift : {-2.0, 2.0}) {
    Poly q = d + Poly::constant(shift);  // roots of Delta = -shift
    std::vector<cdouble> rts = roots(q);
    for (size_t i = 0; i < rts.size(); ++i)
      for (size_t j = i + 1; j < rts.size(); ++j)
        if (std::abs(rts[i] - rts[j]) < 1e-8) {
          std::ostringstream os;
          os << "multiple root of Delta " << (shift > 0 ? "+" : "-") << " 2 near "
             << rts[i].real();
          throw Error(ErrorCode::ClosedGap, os.str());
        }
    for (cdouble z : rts) {
      if (std::abs(z.imag()) > 1e-9) {
        std::ostringstream os;
        os << "nonreal root of Delta " << (shift > 0 ? "+" : "-") << " 2 at Im " << z.imag();
        throw Error(ErrorCode::NonReal, os.str());
      }
      edges.push_back(z.real());
    }
  }

  std::sort(edges.begin(), edges.end());
  for (size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i + 1] - edges[i] < 1e-8)
      throw Error(ErrorCode::ClosedGap, "adjacent band edges closer than 1e-8");

  BandSet bs{std::move(edges)};
  if (bs.p() != p) throw Error(ErrorCode::BadInput, "edge count does not match degree");
  return bs;
}

// Point on the two-sheeted surface carrying the m-function. The plus sheet is
// the one where m is the Stieltjes transform of the spectral measure.
enum class Sheet { plus, minus };

struct SurfacePoint {
  cdouble z;
  Sheet sheet = Sheet::plus;

  // Involution: conjugate the base point and switch sheets.
  SurfacePoint sharp() const { return {std::conj(z), sheet == Sheet::plus ? Sheet::minus : Sheet::plus}; }
};

inline SurfacePoint plus_point(cdouble z) { return {z, Sheet::plus}; }
inline SurfacePoint minus_point(cdouble z) { return {z, Sheet::minus}; }

// m-function of the two-sided p-periodic operator restricted to a half line,
// evaluated on either sheet. The two sheet values are the fixed points of the
// one-period coefficient-stripping map; the plus sheet is the attracting one
// (equivalently the eigenvalue |C m + D| of the stripping matrix is larger).
// At band edges the fixed points coincide and the common value is returned.
inline cdouble periodic_m(const PeriodicBlock& blk, const SurfacePoint& pt) {
  blk.check();
  cdouble z = pt.z;
  // Product of single-step Moebius matrices [[0,1],[-a_j^2, b_j - z]].
  cdouble A = 1.0, B = 0.0, C = 0.0, D = 1.0;
  for (int j = 0; j < blk.p(); ++j) {
    double aj2 = blk.a[static_cast<size_t>(j)] * blk.a[static_cast<size_t>(j)];
    cdouble mj21 = -aj2;
    cdouble mj22 = blk.b[static_cast<size_t>(j)] - z;
    // [[A,B],[C,D]] *= [[0,1],[mj21,mj22]]
    cdouble nA = B * mj21, nB = A + B * mj22;
    cdouble nC = D * mj21, nD = C + D * mj22;
    A = nA;
    B = nB;
    C = nC;
    D = nD;
  }

  cdouble tr = A + D;
  cdouble det = A * D - B * C;
  cdouble disc = tr * tr - 4.0 * det;
  double scale2 = std::norm(tr) + 4.0 * std::abs(det);

  if (std::abs(disc) <= 5e-15 * scale2) {
    // Coincident fixed points: exact band edge (or numerically indistinguishable).
    if (std::abs(C) < 1e-300) throw Error(ErrorCode::PoleHit, "degenerate stripping map");
    return (A - D) / (2.0 * C);
  }

  double cscale = std::abs(A) + std::abs(B) + std::abs(C) + std::abs(D);
  if (std::abs(C) <= 1e-15 * cscale) {
    // One fixed point escaped to infinity: m has a pole here on one sheet.
    cdouble finite = B / (D - A);
    bool pole_on_plus = std::abs(A) > std::abs(D);
    bool want_plus = (pt.sheet == Sheet::plus);
    if (want_plus == pole_on_plus)
      throw Error(ErrorCode::PoleHit, "periodic m-function has a pole at this point");
    return finite;
  }

  cdouble s = std::sqrt(disc);
  cdouble q = A - D;
  // Larger-magnitude numerator first, mate via the product of roots -B/C.
  cdouble num = (std::abs(q + s) >= std::abs(q - s)) ? (q + s) : (q - s);
  cdouble m1 = num / (2.0 * C);
  cdouble m2 = (std::abs(m1) > 0.0) ? (-B / C) / m1 : (q - s) / (2.0 * C);

  cdouble nu1 = C * m1 + D;
  cdouble nu2 = C * m2 + D;
  bool m1_plus = std::abs(nu1) >= std::abs(nu2);
  if (pt.sheet == Sheet::plus) return m1_plus ? m1 : m2;
  return m1_plus ? m2 : m1;
}

}  // namespace jacres
