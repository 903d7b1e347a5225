#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <vector>

#include "jacres/config.hpp"
#include "jacres/errors.hpp"
#include "jacres/operator.hpp"
#include "jacres/periodic.hpp"
#include "jacres/poly.hpp"
#include "jacres/quadrature.hpp"

namespace jacres {

struct DirectOptions {
  double delta = 1e-7;          // probe distance for pole classification
  int nodes = 256;              // per-band nodes for mass normalization
  double snap_im = 1e-9;        // imaginary parts below this count as real
  double edge_snap = 1e-7;      // roots this close to an edge are edge resonances
  double cluster_radius = 1e-5; // root clustering radius for multiplicities
};

// m-function of the operator on either sheet: head coefficients are stripped
// one at a time down to the periodic tail value.
inline cdouble m_function(const EventuallyPeriodicOperator& op, const SurfacePoint& pt) {
  cdouble m = periodic_m(op.tail, pt);
  for (int n = op.s(); n >= 1; --n) {
    cdouble den = op.b(n) - pt.z - op.a(n) * op.a(n) * m;
    if (std::abs(den) < 1e-13)
      throw Error(ErrorCode::PoleHit,
                  "stripping denominator vanished; perturb the evaluation point");
    m = 1.0 / den;
  }
  return m;
}

namespace detail {

// Rebuilds sum gamma_j ((z - c0)/R)^j as a polynomial in z.
inline Poly unscale_poly(const std::vector<double>& gamma, double c0, double R) {
  Poly u({-c0 / R, 1.0 / R});
  Poly res({0.0});
  for (size_t i = gamma.size(); i-- > 0;) res = res * u + Poly::constant(gamma[i]);
  return res;
}

// Sheet difference target: 2 pi sqrt(r(z)) / (m_+(z) - m_-(z)), which equals
// the mass-one polynomial a(z) exactly.
inline cdouble sheet_difference_value(const EventuallyPeriodicOperator& op, const BandSet& bands,
                                      cdouble z) {
  cdouble mp = m_function(op, {z, Sheet::plus});
  cdouble mm = m_function(op, {z, Sheet::minus});
  cdouble diff = mp - mm;
  if (std::abs(diff) == 0.0) throw Error(ErrorCode::DegreeMismatch, "sheet difference vanished");
  return 2.0 * M_PI * bands.sqrt_r(z) / diff;
}

}  // namespace detail

// Least-squares fit of a(z) from sheet differences of m on a circle enclosing
// the spectrum, at the exact degree k + p - 1 of the operator's class. The fit
// is cross-checked at held-out points; disagreement raises DegreeMismatch.
inline Poly recover_a_raw(const EventuallyPeriodicOperator& op, const BandSet& bands) {
  op.check();
  int p = op.tail.p();
  int k = op.class_index();
  int d = k + p - 1;

  double c0 = 0.5 * (bands.edges.front() + bands.edges.back());
  double maxabs = 0.0;
  for (double e : bands.edges) maxabs = std::max(maxabs, std::abs(e));
  double radius = 2.0 * maxabs;

  int m_half = 2 * (k + p);
  Eigen::MatrixXd A(2 * m_half, d + 1);
  Eigen::VectorXd rhs(2 * m_half);
  for (int i = 0; i < m_half; ++i) {
    double th = M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(m_half);
    cdouble u(std::cos(th), std::sin(th));
    cdouble z = c0 + radius * u;
    cdouble g = detail::sheet_difference_value(op, bands, z);
    cdouble upow = 1.0;
    for (int j = 0; j <= d; ++j) {
      A(2 * i, j) = upow.real();
      A(2 * i + 1, j) = upow.imag();
      upow *= u;
    }
    rhs(2 * i) = g.real();
    rhs(2 * i + 1) = g.imag();
  }

  Eigen::VectorXd gamma = A.colPivHouseholderQr().solve(rhs);
  Poly fit = detail::unscale_poly(std::vector<double>(gamma.data(), gamma.data() + d + 1), c0, radius);

  // Held-out check at shifted angles.
  double scale = 0.0;
  double worst = 0.0;
  for (int i = 0; i < m_half; ++i) {
    double th = M_PI * (static_cast<double>(i) + 0.85) / static_cast<double>(m_half);
    cdouble z = c0 + radius * cdouble(std::cos(th), std::sin(th));
    cdouble g = detail::sheet_difference_value(op, bands, z);
    scale = std::max(scale, std::abs(g));
    worst = std::max(worst, std::abs(fit(z) - g));
  }
  if (worst > 1e-8 * std::max(1.0, scale))
    throw Error(ErrorCode::DegreeMismatch,
                "fit at degree k+p-1 does not reproduce the sheet difference");
  return fit;
}

// Total mass of the measure with density sqrt|r|/|a| plus the canonical point
// masses at the given eigenvalues.
inline double measure_mass(const BandSet& bands, const Poly& a, const std::vector<double>& eigs,
                           int nodes) {
  double mass = 0.0;
  for (int kb = 1; kb <= bands.p(); ++kb) {
    auto [al, be] = bands.band(kb);
    mass += chebyshev_u_integral(al, be, nodes, [&](double x) {
      return bands.sqrt_abs_r_reduced(kb, x) / std::abs(a(x));
    });
  }
  Poly da = a.derivative();
  for (double e : eigs) mass += 2.0 * M_PI * bands.sqrt_abs_r(e) / std::abs(da(e));
  return mass;
}

// Full direct-problem output: band set, mass-one a(z), singularity
// configuration, and the canonical weights of the eigenvalues.
struct DirectAnalysis {
  BandSet bands;
  Poly a;
  SingularityConfiguration config;
  std::vector<double> weights;
};

inline DirectAnalysis analyze_operator(const EventuallyPeriodicOperator& op,
                                       const DirectOptions& opts = {}) {
  op.check();
  BandSet bands = band_set(discriminant(op.tail));
  Poly a = recover_a_raw(op, bands);
  Poly da = a.derivative();

  std::vector<cdouble> rts = roots(a);
  snap_real(rts, opts.snap_im);
  std::vector<RootCluster> clusters = cluster_roots(rts, opts.cluster_radius);

  SingularityConfiguration cfg;
  // Symmetrize conjugate pairs before emitting.
  std::vector<RootCluster> complex_up;
  std::vector<bool> taken(clusters.size(), false);
  for (size_t i = 0; i < clusters.size(); ++i) {
    RootCluster& cl = clusters[i];
    if (std::abs(cl.z.imag()) == 0.0) continue;
    if (cl.z.imag() < 0.0) continue;
    for (size_t j = 0; j < clusters.size(); ++j) {
      if (j == i || taken[j] || clusters[j].z.imag() >= 0.0) continue;
      if (std::abs(clusters[j].z - std::conj(cl.z)) <= 10.0 * opts.cluster_radius &&
          clusters[j].mult == cl.mult) {
        cdouble avg = 0.5 * (cl.z + std::conj(clusters[j].z));
        complex_up.push_back({avg, cl.mult});
        taken[i] = taken[j] = true;
        break;
      }
    }
    if (!taken[i])
      throw Error(ErrorCode::ClassificationAmbiguous,
                  "complex zero of a without a conjugate partner");
  }
  for (const RootCluster& cl : complex_up) {
    cfg.resonances.push_back({cl.z.real(), cl.z.imag(), cl.mult});
    cfg.resonances.push_back({cl.z.real(), -cl.z.imag(), cl.mult});
  }

  for (const RootCluster& cl : clusters) {
    if (std::abs(cl.z.imag()) != 0.0) continue;
    double x = cl.z.real();
    double edist = bands.edge_distance(cdouble(x, 0.0));
    if (edist <= opts.edge_snap) {
      // Snap onto the nearest edge: a weightless boundary resonance.
      double snapped = x;
      for (double e : bands.edges)
        if (std::abs(x - e) == edist) snapped = e;
      cfg.resonances.push_back({snapped, 0.0, cl.mult});
      continue;
    }
    if (bands.interior(x)) {
      std::ostringstream os;
      os << "zero of a inside a band interior at " << x;
      throw Error(ErrorCode::ClassificationAmbiguous, os.str());
    }
    if (cl.mult > 1) {
      cfg.resonances.push_back({x, 0.0, cl.mult});
      continue;
    }

    // Simple real zero off the spectrum: pole of m on the plus sheet means
    // eigenvalue. The estimated residue is compared with the canonical weight
    // this location would carry.
    double wcan = 2.0 * M_PI * bands.sqrt_abs_r(x) / std::abs(da(x));
    if (!(wcan > 1e-12)) {
      cfg.resonances.push_back({x, 0.0, cl.mult});
      continue;
    }
    auto probe = [&](Sheet sheet) {
      double acc = 0.0;
      int used = 0;
      for (double side : {1.0, -1.0}) {
        try {
          cdouble m = m_function(op, {cdouble(x + side * opts.delta, 0.0), sheet});
          acc += std::abs(m);
          ++used;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::PoleHit) throw;
          acc += 1e300;
          ++used;
        }
      }
      return opts.delta * acc / static_cast<double>(used);
    };
    double ratio = probe(Sheet::plus) / wcan;
    if (ratio >= 0.5) {
      cfg.eigenvalues.push_back(x);
    } else if (ratio <= 0.01) {
      cfg.resonances.push_back({x, 0.0, 1});
    } else {
      std::ostringstream os;
      os << "location " << x << " sits between interpretations: estimated residue ratio "
         << ratio << " (eigenvalue of weight ~" << wcan * ratio << " vs resonance)";
      throw Error(ErrorCode::ClassificationAmbiguous, os.str());
    }
  }

  cfg.sort_canonical();

  // Mass-one normalization; the raw fit is already physical scale, this
  // removes the residual fit error.
  double mass = measure_mass(bands, a, cfg.eigenvalues, opts.nodes);
  Poly a_norm = a * mass;
  Poly dan = a_norm.derivative();
  std::vector<double> weights;
  for (double e : cfg.eigenvalues)
    weights.push_back(2.0 * M_PI * bands.sqrt_abs_r(e) / std::abs(dan(e)));

  return {std::move(bands), std::move(a_norm), std::move(cfg), std::move(weights)};
}

inline SingularityConfiguration find_singularities(const EventuallyPeriodicOperator& op,
                                                   const DirectOptions& opts = {}) {
  return analyze_operator(op, opts).config;
}

inline Poly recover_a(const EventuallyPeriodicOperator& op, const DirectOptions& opts = {}) {
  return analyze_operator(op, opts).a;
}

struct MConditionEntry {
  bool pass = true;
  std::vector<std::string> witnesses;
};

// Structural checks on the recovered polynomial:
//   zeros_off_bands: no zero of a inside an open band;
//   edge_zeros_simple: zeros at band edges have multiplicity one;
//   single_sheet_poles: no real location is a pole of m on both sheets.
struct MConditionsReport {
  MConditionEntry zeros_off_bands;
  MConditionEntry edge_zeros_simple;
  MConditionEntry single_sheet_poles;

  bool all() const {
    return zeros_off_bands.pass && edge_zeros_simple.pass && single_sheet_poles.pass;
  }
};

inline MConditionsReport verify_m_conditions(const EventuallyPeriodicOperator& op,
                                             const std::optional<Poly>& a_override = std::nullopt,
                                             const DirectOptions& opts = {}) {
  op.check();
  BandSet bands = band_set(discriminant(op.tail));
  Poly a = a_override ? *a_override : recover_a_raw(op, bands);
  Poly da = a.derivative();

  MConditionsReport rep;
  std::vector<cdouble> rts = roots(a);
  snap_real(rts, opts.snap_im);
  std::vector<RootCluster> clusters = cluster_roots(rts, opts.cluster_radius);

  for (const RootCluster& cl : clusters) {
    if (std::abs(cl.z.imag()) != 0.0) continue;
    double x = cl.z.real();
    std::ostringstream os;
    os << "zero of a at " << x << " (multiplicity " << cl.mult << ")";
    double edist = bands.edge_distance(cdouble(x, 0.0));
    if (edist <= opts.edge_snap) {
      if (cl.mult > 1) {
        rep.edge_zeros_simple.pass = false;
        rep.edge_zeros_simple.witnesses.push_back(os.str());
      }
      continue;
    }
    if (bands.interior(x)) {
      rep.zeros_off_bands.pass = false;
      rep.zeros_off_bands.witnesses.push_back(os.str());
      continue;
    }
    // Off the spectrum: pole allowed on one sheet at most.
    double wcan = 2.0 * M_PI * bands.sqrt_abs_r(x) / std::abs(da(x));
    if (!(wcan > 1e-12)) continue;
    auto big = [&](Sheet sheet) {
      double acc = 0.0;
      for (double side : {1.0, -1.0}) {
        try {
          acc += std::abs(m_function(op, {cdouble(x + side * opts.delta, 0.0), sheet}));
        } catch (const Error& err) {
          if (err.code() != ErrorCode::PoleHit) throw;
          acc += 1e300;
        }
      }
      return opts.delta * 0.5 * acc >= 0.5 * wcan;
    };
    if (big(Sheet::plus) && big(Sheet::minus)) {
      rep.single_sheet_poles.pass = false;
      rep.single_sheet_poles.witnesses.push_back(os.str() + " is a pole on both sheets");
    }
  }
  return rep;
}

}  // namespace jacres
