#pragma once

// Two validators that never touch the frequency integral.
//
// fermi_sea_oracle: the mu-dependent part of the zero-point energy. Per
// discrete mode (|E - mu| + |E + mu|)/2 = max(E, mu), so the excess over
// mu = 0 is (mu - E) theta(mu - E). Sum over the discrete k_z spectrum minus
// the bulk integral; both are cut off by the Fermi surface, so the result is
// finite without a regulator.
//
// lattice_oracle: z on N sites with a Wilson term, transverse directions in
// the continuum; mode sum over the Brillouin zone minus its bulk integral.

#include <cmath>
#include <numbers>
#include <vector>

#include "casimir/dispersion.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/model.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

struct FermiSumSpec {
  FieldSpec field;
  BoundaryKind bc = BoundaryKind::PBC;
  int dim = 3;
  double lz = 1.0;
  QuadratureSpec kperp_tol{QuadratureMethod::ADAPTIVE_SUBDIVISION, 1e-13, 1e-300, 2000, 1.0};
};

namespace detail {

/// Int d^{d-1}k/(2pi)^{d-1} (mu - sqrt(m^2 + k^2)) theta(...) for an effective
/// longitudinal mass m = sqrt(M^2 + kz^2) < mu.
inline double fermi_transverse(double m, double mu, int dim, const QuadratureSpec& spec) {
  if (!(m < mu)) return 0.0;
  constexpr double pi = std::numbers::pi;
  const double kmax = std::sqrt((mu - m) * (mu + m));
  switch (dim) {
    case 1: return mu - m;
    case 2: {
      const double log_term = m > 0.0 ? m * m * std::log((mu + kmax) / m) : 0.0;
      return (mu * kmax - log_term) / (2.0 * pi);
    }
    case 3: return (mu * mu * mu / 3.0 - mu * m * m + 2.0 / 3.0 * m * m * m) / (4.0 * pi);
    default: {
      const auto radial = radial_reduction(dim);
      auto g = [&](double k) { return std::pow(k, dim - 2) * (mu - std::sqrt(m * m + k * k)); };
      return radial.angular_factor * integrate_interval(g, 0.0, kmax, spec).value;
    }
  }
}

}  // namespace detail

/// Number of n >= 0 modes at zero transverse momentum strictly below mu.
inline int occupied_mode_count(const FieldSpec& field, BoundaryKind bc, double lz) {
  if (!field.has_fermi_sea()) return 0;
  const auto tri = kernel_triple(bc);
  const double leff = tri.stretch * lz;
  const double kf = field.fermi_momentum();
  const double offset = tri.sign > 0 ? 0.0 : 0.5;
  int count = 0;
  for (int n = 0;; ++n) {
    const double kz = 2.0 * std::numbers::pi * (n + offset) / leff;
    if (!(kz < kf)) break;
    ++count;
  }
  return count;
}

/// Fermi-sea Casimir energy from the discrete spectrum. Boundaries with
/// stretch 2 are evaluated as the stretch-1 spectrum on 2 L with the
/// prefactor ratio p / (-4).
inline double fermi_sea_oracle(const FermiSumSpec& spec) {
  validate(spec.field);
  validate_dimension(spec.dim);
  validate_separation(spec.lz);
  const FieldSpec& f = spec.field;
  if (!f.has_fermi_sea()) return 0.0;

  constexpr double pi = std::numbers::pi;
  const auto tri = kernel_triple(spec.bc);
  const double leff = tri.stretch * spec.lz;
  const double weight = tri.prefactor / -4.0;
  const double kf = f.fermi_momentum();
  auto G = [&](double kz) { return detail::fermi_transverse(std::hypot(f.mass, kz), f.mu, spec.dim, spec.kperp_tol); };

  // Sum over all n in Z. PBC: 2 * primed sum over n >= 0 (half weight at n = 0).
  double modes = 0.0;
  if (tri.sign > 0) {
    double primed = 0.5 * G(0.0);
    for (int n = 1; 2.0 * pi * n / leff < kf; ++n) primed += G(2.0 * pi * n / leff);
    modes = 2.0 * primed;
  } else {
    for (int n = 0; (2.0 * n + 1.0) * pi / leff < kf; ++n) modes += 2.0 * G((2.0 * n + 1.0) * pi / leff);
  }
  // L Int_{-kf}^{kf} dkz/2pi G(kz)
  const double bulk = leff / pi * integrate_interval(G, 0.0, kf, spec.kperp_tol).value;
  return weight * -2.0 * f.degeneracy * (modes - bulk);
}

struct LatticeSpec {
  FieldSpec field;
  int sites = 2;
  double spacing = 1.0;
  double wilson_r = 1.0;
  int dim = 3;

  double lz() const noexcept { return sites * spacing; }
};

struct LatticeResult : EvalResult {
  std::vector<Errc> warnings;
};

namespace detail {

struct WilsonDispersion {
  double mass, spacing, r;

  double operator()(double kz, double kperp2) const {
    const double s = std::sin(kz * spacing) / spacing;
    const double h = std::sin(0.5 * kz * spacing);
    const double w = mass + 2.0 * r / spacing * h * h;
    return std::sqrt(s * s + kperp2 + w * w);
  }

  /// kz in (0, pi/a) with E(kz) = mu. With u = sin^2(kz a / 2):
  /// E^2 = 4(r^2 - 1)/a^2 u^2 + (4/a^2 + 4 r M / a) u + M^2 + kperp^2.
  std::vector<double> fermi_crossings(double kperp2, double mu) const {
    const double a = spacing;
    const double qa = 4.0 * (r * r - 1.0) / (a * a);
    const double qb = 4.0 / (a * a) + 4.0 * r * mass / a;
    const double qc = mass * mass + kperp2 - mu * mu;
    std::vector<double> us;
    if (qa == 0.0) {
      us.push_back(-qc / qb);
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        us.push_back((-qb + sq) / (2.0 * qa));
        us.push_back((-qb - sq) / (2.0 * qa));
      }
    }
    std::vector<double> out;
    for (double u : us)
      if (u > 0.0 && u < 1.0) out.push_back(2.0 / a * std::asin(std::sqrt(u)));
    return out;
  }
};

}  // namespace detail

/// Lattice mode-sum Casimir energy (PBC in z). Warnings: DoublerWarning for
/// wilson_r = 0, CoarseLattice when mu * a > 0.3.
inline LatticeResult lattice_oracle(const LatticeSpec& spec, const Tolerances& tol = {1e-6, 1e-10}) {
  validate(spec.field);
  validate_dimension(spec.dim);
  if (spec.sites < 2 || !(spec.spacing > 0.0) || !(spec.wilson_r >= 0.0) || spec.wilson_r > 1.0)
    throw Error(Errc::InvalidLattice, "need sites >= 2, spacing > 0 and wilson_r in [0, 1]");

  LatticeResult out;
  if (spec.wilson_r == 0.0) out.warnings.push_back(Errc::DoublerWarning);
  if (spec.field.mu * spec.spacing > 0.3) out.warnings.push_back(Errc::CoarseLattice);

  constexpr double pi = std::numbers::pi;
  const FieldSpec& f = spec.field;
  const int n_sites = spec.sites;
  const double a = spec.spacing;
  const double lz = spec.lz();
  const detail::WilsonDispersion disp{f.mass, a, spec.wilson_r};
  const double mu = f.mu;

  QuadratureSpec bz;
  bz.rel_tol = 5e-14;
  bz.abs_tol = 1e-300;
  std::int64_t evals = 0;

  // Sum_n max(E_n, mu) - N a Int_{-pi/a}^{pi/a} dkz/2pi max(E, mu) at fixed kperp.
  auto difference = [&](double kperp) {
    const double k2 = kperp * kperp;
    double sum = 0.0;
    for (int n = 0; n < n_sites; ++n) sum += std::max(disp(2.0 * pi * n / lz, k2), mu);
    std::vector<double> breaks = disp.fermi_crossings(k2, mu);
    const auto bulk = integrate_interval([&](double kz) { return std::max(disp(kz, k2), mu); }, 0.0, pi / a, bz, breaks);
    evals += n_sites + bulk.evaluations;
    return sum - n_sites * a / pi * bulk.value;
  };

  const auto radial = radial_reduction(spec.dim);
  const double prefactor = -2.0 * f.degeneracy;
  if (!radial.has_transverse) {
    out.value = prefactor * difference(0.0);
    out.evaluations = evals;
    return out;
  }

  // Transverse momenta where a lattice mode crosses mu split the radial integral.
  std::vector<double> kbreaks;
  for (int n = 0; n <= n_sites / 2; ++n) {
    const double e0 = disp(2.0 * pi * n / lz, 0.0);
    if (e0 < mu) kbreaks.push_back(std::sqrt((mu - e0) * (mu + e0)));
  }
  // The difference decays like e^{-kperp L}; beyond this it is rounding noise.
  const double kmax = (f.has_fermi_sea() ? f.fermi_momentum() : 0.0) + 40.0 / lz;
  QuadratureSpec outer;
  outer.rel_tol = tol.rel_tol;
  outer.abs_tol = tol.abs_tol;
  outer.max_subdivisions = tol.max_subdivisions;
  auto g = [&](double kperp) {
    const double w = spec.dim == 3 ? kperp : std::pow(kperp, spec.dim - 2);
    return w * difference(kperp);
  };
  const auto r = integrate_interval(g, 0.0, kmax, outer, kbreaks);
  out.value = prefactor * radial.angular_factor * r.value;
  out.abs_error_estimate = std::abs(prefactor * radial.angular_factor) * r.abs_error_estimate;
  out.evaluations = evals;
  out.converged = r.converged;
  return out;
}

}  // namespace casimir
