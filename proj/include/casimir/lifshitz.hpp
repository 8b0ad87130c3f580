#pragma once

// Finite-density Lifshitz formulas for a Dirac field between two plates.
//
//   E(L) = p * g * Int dxi/2pi Int d^{d-1}k/(2pi)^{d-1} ln(1 - s e^{-sigma L kt})
//   kt   = sqrt(M^2 + k^2 - (i xi + mu)^2)
//
// with (s, sigma, p) from the boundary kernel and g the field degeneracy.
// kt(-xi) = conj(kt(xi)), so the two-sided xi integral is folded onto
// (0, inf) as 2 Re. At T > 0 the xi integral becomes T * sum over fermionic
// Matsubara frequencies xi_l = (2l+1) pi T, folded onto l >= 0 the same way.
// The pressure P = -dE/dL uses the analytic L-derivative of the kernel.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "casimir/dispersion.hpp"
#include "casimir/model.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

/// Transverse measure: Int d^{d-1}k/(2pi)^{d-1} f(|k|) = angular_factor * Int_0^inf k^{d-2} f(k) dk.
struct RadialReduction {
  int dim = 3;
  double angular_factor = 1.0;
  bool has_transverse = true;
};

inline RadialReduction radial_reduction(int dim) {
  validate_dimension(dim);
  constexpr double pi = std::numbers::pi;
  switch (dim) {
    case 1: return {1, 1.0, false};
    case 2: return {2, 1.0 / pi, true};
    case 3: return {3, 1.0 / (2.0 * pi), true};
    default: {
      const double n = dim - 1;
      const double omega = 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
      return {dim, omega / std::pow(2.0 * pi, n), true};
    }
  }
}

enum class Observable { Energy, Pressure };

namespace detail {

/// Transverse momenta at which (xi -> 0) the kernel log is resonant, plus
/// the Fermi momentum. These split the radial integral.
inline std::vector<double> resonance_breakpoints(const FieldSpec& field, BoundaryKind bc, double lz) {
  std::vector<double> out;
  if (!field.has_fermi_sea()) return out;
  const double kf = field.fermi_momentum();
  const auto tri = kernel_triple(bc);
  const double step = 2.0 * std::numbers::pi / (tri.stretch * lz);
  // s = +1 resonates at sigma L q = 2 pi m, s = -1 at (2m + 1) pi.
  const double offset = tri.sign > 0 ? 1.0 : 0.5;
  for (double m = offset; m * step < kf; m += 1.0) {
    const double q = m * step;
    out.push_back(std::sqrt((kf - q) * (kf + q)));
  }
  out.push_back(kf);
  return out;
}

struct LifshitzIntegrand {
  FieldSpec field;
  BoundaryKind bc;
  RadialReduction radial;
  double lz;
  Observable what;

  cplx kernel(double xi, double k) const {
    const cplx kt = k_tilde(xi, k * k, field.mass, field.mu);
    return what == Observable::Energy ? kernel_log(bc, lz, kt) : kernel_log_dlz(bc, lz, kt);
  }

  /// Radial-measure weight k^{d-2}.
  double weight(double k) const {
    switch (radial.dim) {
      case 2: return 1.0;
      case 3: return k;
      default: return std::pow(k, radial.dim - 2);
    }
  }
};

inline QuadratureSpec make_spec(const Tolerances& tol, double abs_tol, double decay_scale) {
  QuadratureSpec q;
  q.rel_tol = tol.rel_tol;
  q.abs_tol = abs_tol;
  q.max_subdivisions = tol.max_subdivisions;
  q.decay_scale = decay_scale;
  return q;
}

/// Int d^{d-1}k/(2pi)^{d-1} Re kernel at fixed xi (without the angular factor for d = 1).
inline QuadratureResult transverse_integral(const LifshitzIntegrand& in, double xi, const QuadratureSpec& spec,
                                            std::span<const double> breakpoints) {
  if (!in.radial.has_transverse) {
    QuadratureResult r;
    r.value = in.kernel(xi, 0.0).real();
    r.evaluations = 1;
    return r;
  }
  auto g = [&](double k) { return in.weight(k) * in.kernel(xi, k).real(); };
  QuadratureSpec s = spec;
  s.abs_tol = spec.abs_tol / in.radial.angular_factor;
  QuadratureResult r = integrate_semi_infinite(g, s, breakpoints);
  r.value *= in.radial.angular_factor;
  r.abs_error_estimate *= in.radial.angular_factor;
  return r;
}

inline void validate_inputs(const FieldSpec& field, int dim, double lz, const Tolerances& tol) {
  validate(field);
  validate_dimension(dim);
  validate_separation(lz);
  validate(tol);
}

// `tol` drives the quadrature, `judge` decides convergence.
inline EvalResult lifshitz_T0_once(const FieldSpec& field, BoundaryKind bc, int dim, double lz, const Tolerances& tol,
                                   const Tolerances& judge, Observable what) {
  validate_inputs(field, dim, lz, tol);
  const auto tri = kernel_triple(bc);
  const LifshitzIntegrand in{field, bc, radial_reduction(dim), lz, what};
  // 2 Re Int_0^inf dxi / 2pi -> factor 1/pi.
  const double sign = what == Observable::Energy ? 1.0 : -1.0;
  const double prefactor = sign * tri.prefactor * field.degeneracy / std::numbers::pi;
  const double scale = 1.0 / (tri.stretch * lz);
  // The outer rule gets half the budget; the other half absorbs the integrated inner errors.
  QuadratureSpec outer = make_spec(tol, 0.5 * tol.abs_tol / std::abs(prefactor), scale);
  outer.rel_tol *= 0.5;
  QuadratureSpec inner = outer;
  inner.rel_tol /= 10.0;
  inner.abs_tol /= 10.0;
  const std::vector<double> kbreaks = resonance_breakpoints(field, bc, lz);

  std::int64_t evals = 0;
  bool inner_ok = true;
  auto f = [&](double xi) {
    const QuadratureResult r = transverse_integral(in, xi, inner, kbreaks);
    evals += r.evaluations;
    inner_ok = inner_ok && (r.converged || !in.radial.has_transverse);
    return Sample{r.value, r.abs_error_estimate};
  };
  const QuadratureResult r = integrate_semi_infinite(f, outer);

  EvalResult out;
  out.value = prefactor * r.value;
  out.abs_error_estimate = std::abs(prefactor) * (r.abs_error_estimate + std::abs(r.aux_integral));
  out.evaluations = evals;
  out.converged = inner_ok && out.abs_error_estimate <= judge.bound(out.value);
  return out;
}

/// Repeats `once` with tightened tolerances while the result is not converged.
/// Cancellation near a zero of the result leaves the inner budgets, which are
/// relative to the uncancelled integrand, slightly too loose; inner rules next
/// to a near-resonant breakpoint can also stall. Every attempt is judged
/// against the original tolerances, so a term-limit failure stays a failure.
template <class F>
EvalResult with_refinement(F&& once, const Tolerances& tol) {
  EvalResult total = once(tol, tol);
  Tolerances t = tol;
  for (int attempt = 0; attempt < 3 && !total.converged; ++attempt) {
    const double miss = total.abs_error_estimate / tol.bound(total.value);
    if (!std::isfinite(miss) || miss > 1e4) break;
    const double factor = std::max(4.0, 2.0 * miss);
    t.rel_tol /= factor;
    t.abs_tol /= factor;
    const std::int64_t spent = total.evaluations;
    total = once(t, tol);
    total.evaluations += spent;
  }
  return total;
}

/// Stretch-2 boundaries run as their stretch-1 partner on 2 L:
/// E(L) = (p / p') E'(2 L) = E'(2 L) / 2 and P(L) = P'(2 L). The partner keeps
/// the caller's tolerances (factor <= 1), so both sides of the identity are
/// the same computation.
struct Reduced {
  BoundaryKind bc;
  double lz;
  double factor;
};

inline Reduced reduce(BoundaryKind bc, double lz, Observable what) {
  const auto tri = kernel_triple(bc);
  if (tri.stretch == 1) return {bc, lz, 1.0};
  const BoundaryKind partner = tri.sign > 0 ? BoundaryKind::PBC : BoundaryKind::APBC;
  const double factor = what == Observable::Energy ? tri.prefactor / kernel_triple(partner).prefactor : 1.0;
  return {partner, tri.stretch * lz, factor};
}

inline EvalResult scaled(EvalResult r, double factor) {
  r.value *= factor;
  r.abs_error_estimate *= factor;
  return r;
}

inline EvalResult lifshitz_T0(const FieldSpec& field, BoundaryKind bc, int dim, double lz, const Tolerances& tol,
                              Observable what) {
  validate_inputs(field, dim, lz, tol);
  const Reduced rd = reduce(bc, lz, what);
  auto once = [&](const Tolerances& t, const Tolerances& judge) {
    return lifshitz_T0_once(field, rd.bc, dim, rd.lz, t, judge, what);
  };
  return scaled(with_refinement(once, tol),
                rd.factor);
}

inline double matsubara_frequency(std::int64_t l, double temperature) {
  return (2.0 * static_cast<double>(l) + 1.0) * std::numbers::pi * temperature;
}

inline EvalResult lifshitz_T_once(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                                  const Tolerances& tol, const Tolerances& judge, Observable what) {
  validate_inputs(field, dim, lz, tol);
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw Error(Errc::NegativeTemperature, "the Matsubara evaluator needs T > 0");
  const auto tri = kernel_triple(bc);
  const LifshitzIntegrand in{field, bc, radial_reduction(dim), lz, what};
  const double sign = what == Observable::Energy ? 1.0 : -1.0;
  // T * sum_{l in Z} folded onto l >= 0 -> factor 2T.
  const double prefactor = sign * tri.prefactor * field.degeneracy * 2.0 * temperature;
  const double decay = tri.stretch * lz;
  // Rough count of terms before e^{-sigma L xi} is negligible, to split the absolute budget.
  const double expected_terms =
      1.0 + std::ceil((40.0 / decay + field.mu) / (2.0 * std::numbers::pi * temperature));
  QuadratureSpec inner = make_spec(tol, tol.abs_tol / (10.0 * std::abs(prefactor) * expected_terms), 1.0 / decay);
  inner.rel_tol = tol.rel_tol / 10.0;
  const std::vector<double> kbreaks = resonance_breakpoints(field, bc, lz);

  EvalResult out;
  double sum = 0.0, err = 0.0, prev = 0.0;
  int monotone_run = 0;
  bool inner_ok = true, tail_ok = false;
  double tail = 0.0;
  for (std::int64_t l = 0; l < tol.max_matsubara_terms; ++l) {
    const double xi = matsubara_frequency(l, temperature);
    const QuadratureResult r = transverse_integral(in, xi, inner, kbreaks);
    out.evaluations += r.evaluations;
    inner_ok = inner_ok && (r.converged || !in.radial.has_transverse);
    sum += r.value;
    err += r.abs_error_estimate;
    const double term = std::abs(r.value);
    if (l > 0 && term < prev) {
      ++monotone_run;
    } else {
      monotone_run = 0;
    }
    if (l > 0 && monotone_run >= 2 && xi > field.mu) {
      const double ratio = prev > 0.0 ? term / prev : 0.0;
      tail = ratio < 1.0 ? term * ratio / (1.0 - ratio) : term;
      const double target = std::max(tol.matsubara_tail_tol * std::abs(sum), tol.abs_tol / (10.0 * std::abs(prefactor)));
      if (term == 0.0 || tail <= target) {
        tail_ok = true;
        break;
      }
    }
    prev = term;
  }
  out.value = prefactor * sum;
  out.abs_error_estimate = std::abs(prefactor) * (err + tail);
  out.converged = tail_ok && inner_ok && out.abs_error_estimate <= judge.bound(out.value);
  return out;
}

inline EvalResult lifshitz_T(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                             const Tolerances& tol, Observable what) {
  validate_inputs(field, dim, lz, tol);
  const Reduced rd = reduce(bc, lz, what);
  auto once = [&](const Tolerances& t, const Tolerances& judge) {
    return lifshitz_T_once(field, rd.bc, dim, rd.lz, temperature, t, judge, what);
  };
  return scaled(with_refinement(once, tol),
                rd.factor);
}

}  // namespace detail

inline EvalResult casimir_energy_T0(const FieldSpec& field, BoundaryKind bc, int dim, double lz,
                                    const Tolerances& tol = {}) {
  return detail::lifshitz_T0(field, bc, dim, lz, tol, Observable::Energy);
}

inline EvalResult casimir_pressure_T0(const FieldSpec& field, BoundaryKind bc, int dim, double lz,
                                      const Tolerances& tol = {}) {
  return detail::lifshitz_T0(field, bc, dim, lz, tol, Observable::Pressure);
}

/// Matsubara sum; the result is flagged non-converged if the tail bound is
/// not met within max_matsubara_terms (MatsubaraNotConverged).
inline EvalResult casimir_energy_T(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                                   const Tolerances& tol = {}) {
  return detail::lifshitz_T(field, bc, dim, lz, temperature, tol, Observable::Energy);
}

inline EvalResult casimir_pressure_T(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                                     const Tolerances& tol = {}) {
  return detail::lifshitz_T(field, bc, dim, lz, temperature, tol, Observable::Pressure);
}

/// Dispatches on the temperature: T = 0 uses the frequency integral.
inline EvalResult casimir_energy(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                                 const Tolerances& tol = {}) {
  validate_temperature(temperature);
  return temperature == 0.0 ? casimir_energy_T0(field, bc, dim, lz, tol)
                            : casimir_energy_T(field, bc, dim, lz, temperature, tol);
}

inline EvalResult casimir_pressure(const FieldSpec& field, BoundaryKind bc, int dim, double lz, double temperature,
                                   const Tolerances& tol = {}) {
  validate_temperature(temperature);
  return temperature == 0.0 ? casimir_pressure_T0(field, bc, dim, lz, tol)
                            : casimir_pressure_T(field, bc, dim, lz, temperature, tol);
}

/// Energy-kernel imaginary parts from +xi and -xi integrated together over
/// (0, inf) with the energy prefactor applied. Conjugate symmetry makes this
/// vanish; a nonzero value flags a branch error.
inline EvalResult imaginary_residual(const FieldSpec& field, BoundaryKind bc, int dim, double lz,
                                     const Tolerances& tol = {}) {
  detail::validate_inputs(field, dim, lz, tol);
  const auto tri = kernel_triple(bc);
  const auto radial = radial_reduction(dim);
  const double prefactor = tri.prefactor * field.degeneracy / (2.0 * std::numbers::pi);
  auto both = [&](double xi, double k) {
    const double k2 = k * k;
    return (kernel_log(bc, lz, k_tilde(xi, k2, field.mass, field.mu)) +
            kernel_log(bc, lz, k_tilde(-xi, k2, field.mass, field.mu)))
        .imag();
  };
  QuadratureSpec spec = detail::make_spec(tol, tol.abs_tol, 1.0 / (tri.stretch * lz));
  QuadratureResult r;
  if (!radial.has_transverse) {
    r = integrate_semi_infinite([&](double xi) { return both(xi, 0.0); }, spec);
  } else {
    detail::LifshitzIntegrand in{field, bc, radial, lz, Observable::Energy};
    r = integrate_2d_semi_infinite([&](double xi, double k) { return in.weight(k) * both(xi, k); }, spec);
    r.value *= radial.angular_factor;
    r.abs_error_estimate *= radial.angular_factor;
  }
  EvalResult out;
  out.value = prefactor * r.value;
  out.abs_error_estimate = std::abs(prefactor) * r.abs_error_estimate;
  out.evaluations = r.evaluations;
  out.converged = r.converged;
  return out;
}

}  // namespace casimir
