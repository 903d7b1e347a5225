#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jacres/config.hpp"
#include "jacres/direct.hpp"
#include "jacres/errors.hpp"
#include "jacres/inverse.hpp"
#include "jacres/operator.hpp"
#include "jacres/poly.hpp"
#include "jacres/reconstruct.hpp"

namespace jacres {

// Reads the singularity configuration back off a measure: mass locations are
// the eigenvalues, the remaining zeros of a are the resonances.
inline SingularityConfiguration config_of_measure(const SpectralMeasure& mu,
                                                  double cluster_radius = 1e-7) {
  std::vector<cdouble> rts = roots(mu.a);
  snap_real(rts, 1e-9);
  std::vector<RootCluster> clusters = cluster_roots(rts, cluster_radius);

  SingularityConfiguration cfg;
  std::vector<bool> is_mass(clusters.size(), false);
  for (const PointMass& pm : mu.masses) {
    double best = std::numeric_limits<double>::infinity();
    size_t arg = 0;
    for (size_t i = 0; i < clusters.size(); ++i) {
      double d = std::abs(clusters[i].z - cdouble(pm.E, 0.0));
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    if (best > 1e-6)
      throw Error(ErrorCode::BadInput, "point mass location is not a zero of a");
    is_mass[arg] = true;
    cfg.eigenvalues.push_back(clusters[arg].z.real());
  }
  for (size_t i = 0; i < clusters.size(); ++i) {
    if (is_mass[i]) continue;
    const RootCluster& cl = clusters[i];
    double im = cl.z.imag();
    double edist = mu.bands.edge_distance(cl.z);
    double re = cl.z.real();
    if (im == 0.0 && edist <= 1e-7) {
      for (double e : mu.bands.edges)
        if (std::abs(re - e) == edist) re = e;
    }
    cfg.resonances.push_back({re, im, cl.mult});
  }
  cfg.sort_canonical();
  return cfg;
}

// Removes the point mass at E0. The weight w0 returns to the ac part and the
// surviving masses: a shrinks by (1 - w0), every other weight grows by
// 1/(1 - w0), and the total mass stays one.
inline SpectralMeasure remove_point_mass(const SpectralMeasure& mu, double E0,
                                         double match_tol = 1e-9) {
  auto it = std::find_if(mu.masses.begin(), mu.masses.end(),
                         [&](const PointMass& pm) { return std::abs(pm.E - E0) <= match_tol; });
  if (it == mu.masses.end()) {
    std::ostringstream os;
    os << "no point mass at " << E0;
    throw Error(ErrorCode::NoSuchMass, os.str());
  }
  double w0 = it->w;
  SpectralMeasure out;
  out.bands = mu.bands;
  out.a = mu.a * (1.0 - w0);
  for (const PointMass& pm : mu.masses) {
    if (std::abs(pm.E - it->E) <= match_tol) continue;
    out.masses.push_back({pm.E, pm.w / (1.0 - w0)});
  }
  return out;
}

// Outcome of add_point_mass: either the new measure, or the list of failed
// admissibility conditions.
struct AddOutcome {
  bool accepted = false;
  SpectralMeasure result;
  std::vector<std::string> rejected_conditions;
};

// Adds a point mass w0 at E0. Admissible only when (1) the measure carries a
// simple resonance at E0, (2) w0 is exactly the canonical weight for that
// location, and (3) flipping the resonance to an eigenvalue keeps the
// configuration valid. Rejections name the failed conditions.
inline AddOutcome add_point_mass(const SpectralMeasure& mu, double E0, double w0,
                                 double match_tol = 1e-7) {
  if (mu.bands.contains(E0, 1e-12))
    throw Error(ErrorCode::OnSpectrum, "cannot place a point mass on the essential spectrum");
  for (const PointMass& pm : mu.masses)
    if (std::abs(pm.E - E0) <= match_tol)
      throw Error(ErrorCode::OnSpectrum, "a point mass already sits at this location");

  AddOutcome out;
  SingularityConfiguration cfg = config_of_measure(mu);

  bool has_resonance = false;
  for (const Resonance& r : cfg.resonances)
    if (r.im == 0.0 && std::abs(r.re - E0) <= match_tol && r.mult == 1) has_resonance = true;
  if (!has_resonance)
    out.rejected_conditions.push_back(
        "(1) the measure has no simple resonance at the requested location");

  Poly da = mu.a.derivative();
  double wcan = 2.0 * M_PI * mu.bands.sqrt_abs_r(E0) / std::abs(da(E0));
  if (has_resonance && !(std::abs(w0 - wcan) <= 1e-8 * std::max(1.0, wcan))) {
    std::ostringstream os;
    os << "(2) requested weight " << w0 << " differs from the canonical weight " << wcan;
    out.rejected_conditions.push_back(os.str());
  }

  SingularityConfiguration flipped;
  if (has_resonance) {
    flipped = cfg;
    flipped.eigenvalues.push_back(E0);
    auto it = std::find_if(flipped.resonances.begin(), flipped.resonances.end(),
                           [&](const Resonance& r) {
                             return r.im == 0.0 && std::abs(r.re - E0) <= match_tol;
                           });
    flipped.resonances.erase(it);
    flipped.sort_canonical();
    ValidationReport vr = validate_configuration(flipped, mu.bands);
    if (!vr.pass) {
      std::ostringstream os;
      os << "(3) the flipped configuration is invalid:";
      for (const Violation& v : vr.violations) os << " " << v.clause << " " << v.witness;
      out.rejected_conditions.push_back(os.str());
    }
  }

  if (!out.rejected_conditions.empty()) return out;

  out.accepted = true;
  out.result.bands = mu.bands;
  out.result.a = mu.a * (1.0 + w0);
  for (const PointMass& pm : mu.masses) out.result.masses.push_back({pm.E, pm.w / (1.0 + w0)});
  out.result.masses.push_back({E0, w0 / (1.0 + w0)});
  std::sort(out.result.masses.begin(), out.result.masses.end(),
            [](const PointMass& x, const PointMass& y) { return x.E < y.E; });
  return out;
}

// Christoffel step: multiply in an eigenvalue at E0 paired with a resonance at
// E0 + eps. Only the requested eps is tried; an invalid resulting
// configuration raises InterlacingViolation.
inline SpectralMeasure christoffel_add(const SpectralMeasure& mu, double E0, double eps,
                                       int nodes = 256) {
  if (eps == 0.0) throw Error(ErrorCode::BadInput, "eps must be nonzero");
  if (mu.bands.contains(E0, 1e-12) || mu.bands.contains(E0 + eps, 1e-12))
    throw Error(ErrorCode::OnSpectrum, "E0 and E0+eps must avoid the essential spectrum");

  SingularityConfiguration cfg = config_of_measure(mu);
  cfg.eigenvalues.push_back(E0);
  cfg.resonances.push_back({E0 + eps, 0.0, 1});
  cfg.sort_canonical();
  ValidationReport vr = validate_configuration(cfg, mu.bands);
  if (!vr.pass) {
    std::ostringstream os;
    os << "adding eigenvalue " << E0 << " with resonance at " << E0 + eps
       << " breaks the ordering:";
    for (const Violation& v : vr.violations) os << " " << v.clause << " " << v.witness;
    throw Error(ErrorCode::InterlacingViolation, os.str());
  }
  return build_measure(cfg, mu.bands, nodes);
}

// Perturbation determinant of an eventually free operator (p = 1 tail with
// a = 1, b = 0): L(z) = prod over singularities of (1 - z/zeta), with zeta the
// disk preimage for eigenvalues and the exterior preimage for resonances
// under x = z + 1/z.
inline Poly perturbation_determinant_from_config(const SingularityConfiguration& cfg) {
  Poly L({1.0});
  auto inside = [](double x) {
    double s = (x >= 0.0) ? 1.0 : -1.0;
    return (x - s * std::sqrt(x * x - 4.0)) / 2.0;
  };
  auto outside = [](double x) {
    double s = (x >= 0.0) ? 1.0 : -1.0;
    return (x + s * std::sqrt(x * x - 4.0)) / 2.0;
  };
  for (double e : cfg.eigenvalues) L = L * Poly({1.0, -1.0 / inside(e)});
  for (const Resonance& r : cfg.resonances) {
    if (r.im == 0.0) {
      for (int m = 0; m < r.mult; ++m) L = L * Poly({1.0, -1.0 / outside(r.re)});
    } else if (r.im > 0.0) {
      cdouble x(r.re, r.im);
      cdouble sq = std::sqrt(x * x - 4.0);
      cdouble zeta = (std::abs(x + sq) >= std::abs(x - sq)) ? (x + sq) / 2.0 : (x - sq) / 2.0;
      cdouble invz = 1.0 / zeta;
      for (int m = 0; m < r.mult; ++m)
        L = L * Poly({1.0, -2.0 * invz.real(), std::norm(invz)});
    }
  }
  return L;
}

inline Poly build_perturbation_determinant(const EventuallyPeriodicOperator& op,
                                           const DirectOptions& opts = {}) {
  op.check();
  bool free_tail = op.tail.p() == 1 && std::abs(op.tail.a[0] - 1.0) <= 1e-12 &&
                   std::abs(op.tail.b[0]) <= 1e-12;
  if (!free_tail)
    throw Error(ErrorCode::NotFreeTail, "perturbation determinant needs the free tail a=1, b=0");
  return perturbation_determinant_from_config(find_singularities(op, opts));
}

struct DamsimClause {
  std::string id;
  bool pass = true;
  std::string witness;
};

struct DamsimReport {
  std::vector<DamsimClause> clauses;
  bool pass = true;

  void add(const std::string& id, bool ok, const std::string& witness = "") {
    clauses.push_back({id, ok, witness});
    pass = pass && ok;
  }
};

namespace detail {

struct DamsimHalf {
  // Verdicts for clauses (v)(a)-(c) applied to one sign of the real axis.
  bool parity_first = true, parity_between = true, endpoints_clear = true;
  std::string wa, wb, wc;
};

// Clause (v) for the positive axis after mapping roots t -> t (or t -> -t for
// the mirrored clause (vi)).
inline DamsimHalf damsim_positive_half(const std::vector<RootCluster>& clusters, double R) {
  DamsimHalf out;
  std::vector<double> inside;  // disk roots in (0,1), descending
  std::vector<std::pair<double, int>> line;  // real roots >= 1 with multiplicity
  for (const RootCluster& cl : clusters) {
    if (std::abs(cl.z.imag()) != 0.0) continue;
    double t = cl.z.real();
    if (t > 0.0 && t < 1.0 - 1e-9)
      for (int m = 0; m < cl.mult; ++m) inside.push_back(t);
    if (t >= 1.0 - 1e-9) line.push_back({t, cl.mult});
  }
  std::sort(inside.begin(), inside.end(), std::greater<double>());
  if (inside.empty()) return out;

  int k = 0;
  for (double x : inside)
    if (x > 1.0 / R) ++k;

  auto count_in = [&](double lo, double hi) {
    int c = 0;
    for (auto& [t, m] : line)
      if (t > lo + 1e-12 && t < hi - 1e-12) c += m;
    return c;
  };

  double x1inv = 1.0 / inside[0];
  int c0 = 0;
  for (auto& [t, m] : line)
    if (t >= 1.0 - 1e-9 && t < x1inv - 1e-12) c0 += m;
  if (c0 % 2 != 0) {
    out.parity_first = false;
    std::ostringstream os;
    os << c0 << " zeros on [1, " << x1inv << "), expected an even count";
    out.wa = os.str();
  }

  for (int j = 0; j + 1 < k; ++j) {
    double lo = 1.0 / inside[static_cast<size_t>(j)];
    double hi = 1.0 / inside[static_cast<size_t>(j + 1)];
    int c = count_in(lo, hi);
    if (c % 2 != 1) {
      out.parity_between = false;
      std::ostringstream os;
      os << c << " zeros on (" << lo << ", " << hi << "), expected an odd count";
      out.wb = os.str();
      break;
    }
  }

  for (int j = 0; j < k; ++j) {
    double xinv = 1.0 / inside[static_cast<size_t>(j)];
    for (auto& [t, m] : line)
      if (std::abs(t - xinv) <= 1e-9) {
        out.endpoints_clear = false;
        std::ostringstream os;
        os << "zero of L at the reflected disk root " << xinv;
        out.wc = os.str();
      }
  }
  return out;
}

}  // namespace detail

// Clause-by-clause damped simplicity check of a candidate perturbation
// determinant on the disk of radius R (R > 1):
//   (i) real coefficients, (ii) roots in the closed unit disk are real,
//   (iii) those roots are simple, (iv) L(0) = 1, (v) parity of the real zeros
//   beyond 1 relative to the reflected disk roots, (vi) the mirror of (v) on
//   the negative axis.
inline DamsimReport check_damsim(const Poly& L, double R = 1e6) {
  if (!(R > 1.0)) throw Error(ErrorCode::BadInput, "R must exceed 1");
  DamsimReport rep;
  rep.add("i", true);  // real by representation

  std::vector<cdouble> rts = roots(L);
  snap_real(rts, 1e-9);
  std::vector<RootCluster> clusters = cluster_roots(rts, 1e-8);

  bool disk_real = true, disk_simple = true;
  std::string w2, w3;
  for (const RootCluster& cl : clusters) {
    if (std::abs(cl.z) <= 1.0 + 1e-9 && std::abs(cl.z.imag()) != 0.0) {
      disk_real = false;
      std::ostringstream os;
      os << "nonreal zero at " << cl.z.real() << " + " << cl.z.imag() << "i inside the disk";
      w2 = os.str();
    }
    if (std::abs(cl.z) <= 1.0 + 1e-9 && std::abs(cl.z.imag()) == 0.0 && cl.mult > 1) {
      disk_simple = false;
      std::ostringstream os;
      os << "zero of multiplicity " << cl.mult << " at " << cl.z.real();
      w3 = os.str();
    }
  }
  rep.add("ii", disk_real, w2);
  rep.add("iii", disk_simple, w3);

  double l0 = L(0.0);
  bool normalized = std::abs(l0 - 1.0) <= 1e-12 * std::max(1.0, L.max_abs_coeff());
  std::ostringstream os4;
  if (!normalized) os4 << "L(0) = " << l0;
  rep.add("iv", normalized, os4.str());

  detail::DamsimHalf pos = detail::damsim_positive_half(clusters, R);
  rep.add("v.a", pos.parity_first, pos.wa);
  rep.add("v.b", pos.parity_between, pos.wb);
  rep.add("v.c", pos.endpoints_clear, pos.wc);

  std::vector<RootCluster> mirrored = clusters;
  for (RootCluster& cl : mirrored) cl.z = -cl.z;
  detail::DamsimHalf neg = detail::damsim_positive_half(mirrored, R);
  rep.add("vi.a", neg.parity_first, neg.wa);
  rep.add("vi.b", neg.parity_between, neg.wb);
  rep.add("vi.c", neg.endpoints_clear, neg.wc);

  return rep;
}

}  // namespace jacres
