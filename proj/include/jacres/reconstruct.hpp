#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jacres/dd.hpp"
#include "jacres/errors.hpp"
#include "jacres/inverse.hpp"
#include "jacres/quadrature.hpp"

namespace jacres {

// Moments m_n = integral x^n dmu for n = 0..n_max, band quadrature plus point
// masses, with node doubling until the relative change drops below 1e-13.
inline std::vector<double> moments(const SpectralMeasure& mu, int n_max, int nodes = 512,
                                   int node_cap = 4096) {
  auto compute = [&](int n) {
    std::vector<double> m(static_cast<size_t>(n_max) + 1, 0.0);
    for (int k = 1; k <= mu.bands.p(); ++k) {
      auto [al, be] = mu.bands.band(k);
      for (const QuadNode& q : chebyshev_u_rule(al, be, n)) {
        double g = q.w * mu.bands.sqrt_abs_r_reduced(k, q.x) / std::abs(mu.a(q.x));
        double xp = 1.0;
        for (int j = 0; j <= n_max; ++j) {
          m[static_cast<size_t>(j)] += g * xp;
          xp *= q.x;
        }
      }
    }
    for (const PointMass& pm : mu.masses) {
      double xp = 1.0;
      for (int j = 0; j <= n_max; ++j) {
        m[static_cast<size_t>(j)] += pm.w * xp;
        xp *= pm.E;
      }
    }
    return m;
  };

  int n = std::max(64, nodes);
  std::vector<double> cur = compute(n);
  while (true) {
    if (2 * n > node_cap)
      throw Error(ErrorCode::QuadratureUnderresolved,
                  "moments did not settle within the node cap");
    std::vector<double> fine = compute(2 * n);
    double worst = 0.0;
    for (size_t j = 0; j < cur.size(); ++j)
      worst = std::max(worst, std::abs(fine[j] - cur[j]) / std::max(1.0, std::abs(fine[j])));
    cur = std::move(fine);
    n *= 2;
    if (worst <= 1e-13) break;
  }
  return cur;
}

struct HankelReconstruction {
  std::vector<double> a;  // a_1..a_n
  std::vector<double> b;  // b_1..b_n
  std::vector<double> h;  // h_1..h_{n+1}, leading principal Hankel determinants
  std::optional<int> failed_at;
  std::string failure;
};

// Coefficients from raw moments via Hankel determinants, in double-double
// arithmetic (Cholesky bordering of the moment matrix). Stops early, filling
// failed_at, when positivity is lost or when the determinant falls under
// 1e-3 of its conditioning-based error bound: kappa * n * eps > 1e3 with
// kappa the pivot spread of the Cholesky factor.
inline HankelReconstruction hankel_from_moments(const std::vector<double>& mom, int n_terms) {
  if (n_terms < 1) throw Error(ErrorCode::BadInput, "need at least one coefficient");
  if (mom.size() < static_cast<size_t>(2 * n_terms + 1))
    throw Error(ErrorCode::BadInput, "need moments m_0..m_{2n} for n coefficients");

  const double eps = 1.1e-16;
  HankelReconstruction out;
  int dim = n_terms + 1;  // h up to n_terms + 1
  std::vector<std::vector<dd>> L(static_cast<size_t>(dim));
  std::vector<dd> piv2(static_cast<size_t>(dim));  // squared pivots
  dd hdet(1.0);
  double piv_min = 0.0, piv_max = 0.0;

  std::vector<dd> bsum(static_cast<size_t>(dim) + 1, dd(0.0));  // B_n = b_1 + .. + b_n

  for (int n = 1; n <= dim; ++n) {
    // Border: column c_i = m_{i-1 + n-1}, i = 1..n-1, diagonal m_{2n-2}.
    std::vector<dd> y(static_cast<size_t>(n - 1));
    for (int i = 1; i <= n - 1; ++i) {
      dd acc(mom[static_cast<size_t>(i + n - 2)]);
      const std::vector<dd>& Li = L[static_cast<size_t>(i - 1)];
      for (int k = 1; k <= i - 1; ++k)
        acc = acc - Li[static_cast<size_t>(k - 1)] * y[static_cast<size_t>(k - 1)];
      y[static_cast<size_t>(i - 1)] = acc / Li[static_cast<size_t>(i - 1)];
    }
    dd diag(mom[static_cast<size_t>(2 * n - 2)]);
    for (const dd& v : y) diag = diag - v * v;

    if (!(diag.value() > 0.0)) {
      out.failed_at = n;
      std::ostringstream os;
      os << "moment matrix lost positivity at n = " << n;
      out.failure = os.str();
      return out;
    }
    double pv = diag.value();
    piv_min = (n == 1) ? pv : std::min(piv_min, pv);
    piv_max = (n == 1) ? pv : std::max(piv_max, pv);
    double kappa = piv_max / piv_min;
    if (kappa * static_cast<double>(n) * eps > 1e3) {
      out.failed_at = n;
      std::ostringstream os;
      os << "Hankel determinant below 1e-3 of its error bound at n = " << n
         << " (pivot spread " << kappa << ")";
      out.failure = os.str();
      return out;
    }

    // Store the new row of L (scaled by the new pivot).
    std::vector<dd> row = y;
    dd lnn = dd_sqrt(diag);
    row.push_back(lnn);
    L[static_cast<size_t>(n - 1)] = std::move(row);
    piv2[static_cast<size_t>(n - 1)] = diag;
    hdet = hdet * diag;
    out.h.push_back(hdet.value());

    // B_n from the shifted-column system H_n x = (m_n, ..., m_{2n-1})^T.
    if (n <= n_terms) {
      std::vector<dd> z(static_cast<size_t>(n));
      for (int i = 1; i <= n; ++i) {
        dd acc(mom[static_cast<size_t>(n + i - 1)]);
        const std::vector<dd>& Li = L[static_cast<size_t>(i - 1)];
        for (int k = 1; k <= i - 1; ++k)
          acc = acc - Li[static_cast<size_t>(k - 1)] * z[static_cast<size_t>(k - 1)];
        z[static_cast<size_t>(i - 1)] = acc / Li[static_cast<size_t>(i - 1)];
      }
      // Back substitution, only the last entry is needed.
      std::vector<dd> x(static_cast<size_t>(n));
      for (int i = n; i >= 1; --i) {
        dd acc = z[static_cast<size_t>(i - 1)];
        for (int k = i + 1; k <= n; ++k)
          acc = acc - L[static_cast<size_t>(k - 1)][static_cast<size_t>(i - 1)] * x[static_cast<size_t>(k - 1)];
        x[static_cast<size_t>(i - 1)] = acc / L[static_cast<size_t>(i - 1)][static_cast<size_t>(i - 1)];
      }
      bsum[static_cast<size_t>(n)] = x[static_cast<size_t>(n - 1)];
      out.b.push_back((bsum[static_cast<size_t>(n)] - bsum[static_cast<size_t>(n - 1)]).value());
    }

    // a_n = l_{n,n} / l_{n-1,n-1} via pivot ratio (equals sqrt(h_{n+1}h_{n-1})/h_n).
    if (n >= 2) out.a.push_back(dd_sqrt(diag / piv2[static_cast<size_t>(n - 2)]).value());
  }
  return out;
}

// Throwing wrapper: reconstruct n_terms coefficient pairs from the measure.
inline HankelReconstruction hankel_reconstruct(const SpectralMeasure& mu, int n_terms = 12,
                                               int nodes = 512) {
  std::vector<double> mom = moments(mu, 2 * n_terms + 1, nodes);
  HankelReconstruction rec = hankel_from_moments(mom, n_terms);
  if (rec.failed_at) throw Error(ErrorCode::LostPrecision, rec.failure);
  return rec;
}

struct JacobiCoefficients {
  std::vector<double> a;  // a_1..a_n
  std::vector<double> b;  // b_1..b_n
};

namespace detail {

struct DiscreteMeasure {
  std::vector<double> x;
  std::vector<double> w;
};

inline DiscreteMeasure discretize(const SpectralMeasure& mu, int nodes) {
  DiscreteMeasure d;
  for (int k = 1; k <= mu.bands.p(); ++k) {
    auto [al, be] = mu.bands.band(k);
    for (const QuadNode& q : chebyshev_u_rule(al, be, nodes)) {
      d.x.push_back(q.x);
      d.w.push_back(q.w * mu.bands.sqrt_abs_r_reduced(k, q.x) / std::abs(mu.a(q.x)));
    }
  }
  for (const PointMass& pm : mu.masses) {
    d.x.push_back(pm.E);
    d.w.push_back(pm.w);
  }
  return d;
}

// Three-term recurrence coefficients of the discretized measure with full
// reorthogonalization (applied twice, which restores orthogonality to
// rounding level even for many steps).
inline JacobiCoefficients lanczos(const DiscreteMeasure& dm, int n_terms) {
  size_t m = dm.x.size();
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (size_t i = 0; i < m; ++i) s += dm.w[i] * u[i] * v[i];
    return s;
  };

  JacobiCoefficients out;
  std::vector<std::vector<double>> basis;
  double w0 = 0.0;
  for (double w : dm.w) w0 += w;
  std::vector<double> v(m, 1.0 / std::sqrt(w0));
  std::vector<double> v_prev(m, 0.0);
  basis.push_back(v);
  double a_prev = 0.0;

  for (int n = 1; n <= n_terms; ++n) {
    std::vector<double> xv(m);
    for (size_t i = 0; i < m; ++i) xv[i] = dm.x[i] * v[i];
    double bn = dot(xv, v);
    out.b.push_back(bn);

    std::vector<double> u(m);
    for (size_t i = 0; i < m; ++i) u[i] = xv[i] - bn * v[i] - a_prev * v_prev[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const std::vector<double>& q : basis) {
        double c = dot(u, q);
        for (size_t i = 0; i < m; ++i) u[i] -= c * q[i];
      }

    double norm2 = dot(u, u);
    if (!(norm2 > 0.0))
      throw Error(ErrorCode::QuadratureUnderresolved,
                  "discretized measure exhausted before the requested order");
    double an = std::sqrt(norm2);
    out.a.push_back(an);
    v_prev = v;
    for (size_t i = 0; i < m; ++i) v[i] = u[i] / an;
    basis.push_back(v);
    a_prev = an;
  }
  return out;
}

}  // namespace detail

// Discretization procedure: per-band Chebyshev rules feed a reorthogonalized
// recurrence; node counts double until two resolutions agree to 1e-9.
inline JacobiCoefficients stieltjes_reconstruct(const SpectralMeasure& mu, int n_terms,
                                                int nodes = 512, int node_cap = 4096) {
  int n = std::max(64, nodes);
  JacobiCoefficients cur = detail::lanczos(detail::discretize(mu, n), n_terms);
  while (true) {
    if (2 * n > node_cap)
      throw Error(ErrorCode::QuadratureUnderresolved,
                  "coefficients did not settle within the node cap");
    JacobiCoefficients fine = detail::lanczos(detail::discretize(mu, 2 * n), n_terms);
    double worst = 0.0;
    for (int i = 0; i < n_terms; ++i) {
      worst = std::max(worst, std::abs(fine.a[static_cast<size_t>(i)] - cur.a[static_cast<size_t>(i)]));
      worst = std::max(worst, std::abs(fine.b[static_cast<size_t>(i)] - cur.b[static_cast<size_t>(i)]));
    }
    cur = std::move(fine);
    n *= 2;
    if (worst <= 1e-9) break;
  }
  return cur;
}

struct TailDetection {
  int s = 0;
  int k = 0;
  PeriodicBlock tail;
  bool a_test_marginal = false;  // |a_s - a_{s+p}| within a factor 2 of tol
};

// Finds the smallest s with (a_n, b_n) p-periodic for every compared index
// beyond s, reads the tail block from positions s+1..s+p, and classifies:
// k = 2s if a_s breaks periodicity, k = 2s-1 if only b_s does, k = 0 if none.
inline TailDetection detect_tail(const std::vector<double>& a, const std::vector<double>& b,
                                 int p, double tol = 1e-7) {
  if (p < 1) throw Error(ErrorCode::BadInput, "period must be positive");
  int len = static_cast<int>(std::min(a.size(), b.size()));
  if (len < 2 * p + 2)
    throw Error(ErrorCode::BadInput, "need at least 2p+2 coefficient pairs");

  auto adev = [&](int n) {  // 1-based
    return std::abs(a[static_cast<size_t>(n - 1)] - a[static_cast<size_t>(n + p - 1)]);
  };
  auto bdev = [&](int n) {
    return std::abs(b[static_cast<size_t>(n - 1)] - b[static_cast<size_t>(n + p - 1)]);
  };

  int last_bad = 0;
  for (int n = 1; n <= len - p; ++n)
    if (adev(n) + bdev(n) > tol) last_bad = n;
  int s = last_bad;
  if (s > len - 2 * p)
    throw Error(ErrorCode::NoTailFound, "no periodic tail within tolerance");

  TailDetection out;
  out.s = s;
  out.tail.a.assign(a.begin() + s, a.begin() + s + p);
  out.tail.b.assign(b.begin() + s, b.begin() + s + p);
  out.tail.check();
  if (s == 0) {
    out.k = 0;
  } else {
    double ad = adev(s);
    out.k = (ad > tol) ? 2 * s : 2 * s - 1;
    out.a_test_marginal = (ad > 0.5 * tol && ad < 2.0 * tol);
  }
  return out;
}

}  // namespace jacres
