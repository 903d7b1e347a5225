#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "jacres/errors.hpp"
#include "jacres/periodic.hpp"

namespace jacres {

struct Resonance {
  double re = 0.0;
  double im = 0.0;
  int mult = 1;
};

// Prescribed spectral data: eigenvalue locations (real, simple, off the bands)
// and resonance locations (real off band interiors, or conjugate-paired).
struct SingularityConfiguration {
  std::vector<double> eigenvalues;
  std::vector<Resonance> resonances;

  int total_count() const {
    int n = static_cast<int>(eigenvalues.size());
    for (const Resonance& r : resonances) n += r.mult;
    return n;
  }

  void sort_canonical() {
    std::sort(eigenvalues.begin(), eigenvalues.end());
    std::sort(resonances.begin(), resonances.end(), [](const Resonance& x, const Resonance& y) {
      if (x.re != y.re) return x.re < y.re;
      return x.im < y.im;
    });
  }
};

struct Violation {
  std::string clause;
  std::string witness;
};

struct ValidationReport {
  bool pass = true;
  std::vector<Violation> violations;

  void add(const std::string& clause, const std::string& witness) {
    pass = false;
    violations.push_back({clause, witness});
  }
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Real points of the configuration with multiplicity, as (location, is_eigenvalue).
inline std::vector<std::pair<double, bool>> real_points(const SingularityConfiguration& cfg,
                                                        double im_tol = 0.0) {
  std::vector<std::pair<double, bool>> pts;
  for (double e : cfg.eigenvalues) pts.push_back({e, true});
  for (const Resonance& r : cfg.resonances)
    if (std::abs(r.im) <= im_tol)
      for (int m = 0; m < r.mult; ++m) pts.push_back({r.re, false});
  return pts;
}

}  // namespace detail

// Checks the solvability conditions on prescribed spectral data:
//   O1 ordering outward from every band edge puts no eigenvalue at an even
//      position (ties and edge points included), and eigenvalue/resonance
//      locations are disjoint;
//   O2 every closed gap carries an odd number of points with multiplicity;
//   O3 eigenvalues are real, simple, and off the essential spectrum;
//   O4 resonances avoid open band interiors, come conjugate-closed with equal
//      multiplicities, and band-edge resonances are simple.
// Violations are reported as data, not thrown.
inline ValidationReport validate_configuration(const SingularityConfiguration& cfg,
                                               const BandSet& bands) {
  ValidationReport rep;
  const double same_tol = 1e-12;
  int p = bands.p();

  for (const Resonance& r : cfg.resonances) {
    if (r.mult < 1) rep.add("O4", "resonance with nonpositive multiplicity at " + detail::num(r.re));
    if (!std::isfinite(r.re) || !std::isfinite(r.im))
      rep.add("O4", "resonance with nonfinite coordinates");
  }
  for (double e : cfg.eigenvalues)
    if (!std::isfinite(e)) rep.add("O3", "nonfinite eigenvalue");

  // O3: eigenvalues real (by representation), simple, off the spectrum.
  for (size_t i = 0; i < cfg.eigenvalues.size(); ++i) {
    double e = cfg.eigenvalues[i];
    for (size_t j = i + 1; j < cfg.eigenvalues.size(); ++j)
      if (std::abs(e - cfg.eigenvalues[j]) <= same_tol)
        rep.add("O3", "eigenvalue repeated at " + detail::num(e));
    if (bands.contains(e, same_tol)) rep.add("O3", "eigenvalue inside the essential spectrum at " + detail::num(e));
  }

  // Disjointness of eigenvalue and resonance locations.
  for (double e : cfg.eigenvalues)
    for (const Resonance& r : cfg.resonances)
      if (std::abs(r.im) <= same_tol && std::abs(r.re - e) <= same_tol)
        rep.add("O1", "eigenvalue and resonance share the location " + detail::num(e));

  // O4: real resonances off band interiors; edge resonances simple;
  // nonreal ones conjugate-closed with matching multiplicity.
  for (size_t i = 0; i < cfg.resonances.size(); ++i) {
    const Resonance& r = cfg.resonances[i];
    if (std::abs(r.im) <= same_tol) {
      double x = r.re;
      bool edge = bands.edge_distance(cdouble(x, 0.0)) <= 1e-9;
      if (!edge && bands.interior(x))
        rep.add("O4", "real resonance inside a band at " + detail::num(x));
      if (edge) {
        int mult_here = 0;
        for (const Resonance& q : cfg.resonances)
          if (std::abs(q.im) <= same_tol && std::abs(q.re - x) <= same_tol) mult_here += q.mult;
        if (mult_here > 1) rep.add("O4", "band-edge resonance not simple at " + detail::num(x));
      }
    } else {
      int mirror = 0;
      for (const Resonance& q : cfg.resonances)
        if (std::abs(q.re - r.re) <= 1e-9 * std::max(1.0, std::abs(r.re)) &&
            std::abs(q.im + r.im) <= 1e-9 * std::max(1.0, std::abs(r.im)))
          mirror += q.mult;
      if (mirror != r.mult)
        rep.add("O4", "resonance at " + detail::num(r.re) + "+" + detail::num(r.im) +
                          "i lacks a matching conjugate");
    }
  }

  // O2: odd count in every closed gap.
  auto pts = detail::real_points(cfg, same_tol);
  for (int k = 1; k + 1 <= p; ++k) {
    auto [lo, hi] = bands.gap(k);
    int count = 0;
    for (auto& [x, is_e] : pts)
      if (x >= lo - same_tol && x <= hi + same_tol) ++count;
    if (count % 2 == 0)
      rep.add("O2", "gap [" + detail::num(lo) + ", " + detail::num(hi) + "] holds " +
                        std::to_string(count) + " singularities, expected odd");
  }

  // O1: outward ordering from each band edge, even positions must not be
  // eigenvalues. Right-looking from each beta_k, left-looking from each alpha_k.
  auto check_direction = [&](double edge, double limit, bool rightward) {
    std::vector<std::pair<double, bool>> local;
    for (auto& [x, is_e] : pts) {
      double d = rightward ? x - edge : edge - x;
      double dlim = rightward ? limit - x : x - limit;
      if (d >= -same_tol && (std::isinf(limit) || dlim > same_tol)) local.push_back({d, is_e});
    }
    std::stable_sort(local.begin(), local.end(),
                     [](auto& u, auto& v) { return u.first < v.first; });
    for (size_t i = 1; i < local.size(); i += 2)
      if (local[i].second) {
        rep.add("O1", "eigenvalue at even position " + std::to_string(i + 1) +
                          (rightward ? " right of edge " : " left of edge ") + detail::num(edge));
        return;
      }
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= p; ++k) {
    auto [al, be] = bands.band(k);
    double left_limit = (k == 1) ? -inf : bands.band(k - 1).second;
    double right_limit = (k == p) ? inf : bands.band(k + 1).first;
    check_direction(al, left_limit, false);
    check_direction(be, right_limit, true);
  }

  return rep;
}

}  // namespace jacres
