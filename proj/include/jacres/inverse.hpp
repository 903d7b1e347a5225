#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "jacres/config.hpp"
#include "jacres/errors.hpp"
#include "jacres/periodic.hpp"
#include "jacres/poly.hpp"
#include "jacres/quadrature.hpp"

namespace jacres {

struct PointMass {
  double E = 0.0;
  double w = 0.0;
};

// Probability measure sqrt|r(x)|/|a(x)| dx on the bands plus point masses.
// a is the mass-one normalized polynomial whose zeros are the singularities.
struct SpectralMeasure {
  BandSet bands;
  Poly a;
  std::vector<PointMass> masses;
};

namespace detail {

// Integral of sqrt|r| * g over the bands with per-band Chebyshev rules.
template <typename G>
double ac_integral(const BandSet& bands, int nodes, G&& g) {
  double acc = 0.0;
  for (int k = 1; k <= bands.p(); ++k) {
    auto [al, be] = bands.band(k);
    acc += chebyshev_u_integral(al, be, nodes, [&](double x) {
      return bands.sqrt_abs_r_reduced(k, x) * g(x);
    });
  }
  return acc;
}

}  // namespace detail

// Builds the measure carrying the prescribed singularities: a(z) has the
// eigenvalues and resonances as zeros (resonance multiplicity repeated), is
// positive on the last band, and is scaled so the total mass is one. Point
// masses get their canonical weights 2 pi sqrt(r(E)) / |a'(E)|.
inline SpectralMeasure build_measure(const SingularityConfiguration& cfg_in, const BandSet& bands,
                                     int nodes = 256) {
  ValidationReport rep = validate_configuration(cfg_in, bands);
  if (!rep.pass) {
    std::ostringstream os;
    os << "configuration rejected";
    for (const Violation& v : rep.violations) os << "; " << v.clause << ": " << v.witness;
    throw Error(ErrorCode::InvalidConfiguration, os.str());
  }

  // Snap resonances sitting within 1e-9 of a band edge onto the edge.
  SingularityConfiguration cfg = cfg_in;
  for (Resonance& r : cfg.resonances) {
    if (r.im != 0.0) continue;
    for (double e : bands.edges)
      if (std::abs(r.re - e) <= 1e-9) r.re = e;
  }

  std::vector<cdouble> zeros;
  for (double e : cfg.eigenvalues) zeros.emplace_back(e, 0.0);
  for (const Resonance& r : cfg.resonances)
    for (int m = 0; m < r.mult; ++m) zeros.emplace_back(r.re, r.im);
  Poly monic = poly_from_roots(zeros, 1e-9);

  auto [alp, bep] = bands.band(bands.p());
  double sign = (monic(0.5 * (alp + bep)) >= 0.0) ? 1.0 : -1.0;
  Poly base = monic * sign;
  Poly dbase = base.derivative();

  // One pass for the normalization constant, refined by node doubling.
  auto mass_at = [&](int n) {
    double mass = detail::ac_integral(bands, n, [&](double x) { return 1.0 / std::abs(base(x)); });
    for (double e : cfg.eigenvalues)
      mass += 2.0 * M_PI * bands.sqrt_abs_r(e) / std::abs(dbase(e));
    return mass;
  };
  int n = std::max(64, nodes);
  double mass = mass_at(n);
  while (n < 4096) {
    double refined = mass_at(2 * n);
    bool settled = std::abs(refined - mass) <= 1e-13 * std::abs(refined);
    mass = refined;
    n *= 2;
    if (settled) break;
  }
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::InvalidConfiguration, "normalization mass is not positive and finite");

  SpectralMeasure out;
  out.bands = bands;
  out.a = base * mass;
  Poly da = out.a.derivative();
  for (double e : cfg.eigenvalues)
    out.masses.push_back({e, 2.0 * M_PI * bands.sqrt_abs_r(e) / std::abs(da(e))});
  std::sort(out.masses.begin(), out.masses.end(),
            [](const PointMass& x, const PointMass& y) { return x.E < y.E; });
  return out;
}

// Density of the absolutely continuous part: sqrt|r(x)|/|a(x)| inside bands,
// 0 off the spectrum, +infinity at a band edge where a vanishes.
inline double ac_density(const SpectralMeasure& mu, double x) {
  const BandSet& bands = mu.bands;
  double edist = bands.edge_distance(cdouble(x, 0.0));
  double ascale = mu.a.max_abs_coeff();
  if (edist <= 1e-12) {
    if (std::abs(mu.a(x)) <= 1e-9 * std::max(1.0, ascale))
      return std::numeric_limits<double>::infinity();
    return 0.0;
  }
  if (!bands.interior(x)) return 0.0;
  double av = std::abs(mu.a(x));
  if (av == 0.0) return std::numeric_limits<double>::infinity();
  return bands.sqrt_abs_r(x) / av;
}

}  // namespace jacres
