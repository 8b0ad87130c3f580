#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "casimir/model.hpp"

namespace casimir {

using cplx = std::complex<double>;

/// Boundary condition kernel: ln(1 - sign * exp(-stretch * L * k)) with
/// energy prefactor `prefactor` (before the field degeneracy).
struct KernelTriple {
  int sign;
  int stretch;
  double prefactor;
};

constexpr KernelTriple kernel_triple(BoundaryKind bc) noexcept {
  switch (bc) {
    case BoundaryKind::PBC: return {+1, 1, -4.0};
    case BoundaryKind::APBC: return {-1, 1, -4.0};
    case BoundaryKind::MIT: return {-1, 2, -2.0};
    case BoundaryKind::DIRICHLET_TYPE: return {+1, 2, -2.0};
  }
  return {+1, 1, -4.0};
}

/// Complex longitudinal momentum sqrt(M^2 + k_perp^2 - (i xi + mu)^2) on the
/// principal branch, i.e. sqrt((M^2 + k_perp^2 + xi^2 - mu^2) - 2 i mu xi).
inline cplx k_tilde(double xi, double kperp2, double mass, double mu) noexcept {
  // (M - mu)(M + mu) keeps the real part accurate near the Fermi surface.
  const double re = (mass - mu) * (mass + mu) + kperp2 + xi * xi;
  // xi = 0 maps to +0 so the cut is approached from above: sqrt(-4) = +2i.
  const double im = xi == 0.0 ? 0.0 : -2.0 * mu * xi;
  return std::sqrt(cplx(re, im));
}

namespace detail {

/// ln(1 + w) accurate for small |w|; real part via log1p(2 Re w + |w|^2).
inline cplx log1p(cplx w) noexcept {
  const double x = w.real();
  const double y = w.imag();
  const double re = 0.5 * std::log1p(x * (2.0 + x) + y * y);
  const double im = std::atan2(y, 1.0 + x);
  return {re, im};
}

/// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) noexcept {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// 1 - s e^{-z} and -s e^{-z}, the former accurate near its zeros.
struct KernelArgument {
  cplx one_minus;  // 1 - s e^{-z}
  cplx w;          // -s e^{-z}
};

inline KernelArgument kernel_argument(int sign, cplx z) noexcept {
  const cplx e = std::exp(-z);
  const cplx w = -static_cast<double>(sign) * e;
  if (std::abs(w) < 0.5) return {1.0 + w, w};
  // 1 + e^{-z} = 1 - e^{-(z - i pi)}
  const cplx shifted = sign > 0 ? z : z - cplx(0.0, std::numbers::pi);
  return {-expm1(-shifted), w};
}

inline cplx log_kernel_argument(const KernelArgument& a) noexcept {
  return std::abs(a.w) < 0.5 ? log1p(a.w) : std::log(a.one_minus);
}

}  // namespace detail

/// ln(1 - s e^{-sigma L kt}) on the principal logarithm.
inline cplx kernel_log(BoundaryKind bc, double lz, cplx kt) {
  const auto tri = kernel_triple(bc);
  const auto arg = detail::kernel_argument(tri.sign, static_cast<double>(tri.stretch) * lz * kt);
  if (arg.one_minus == cplx(0.0, 0.0)) throw Error(Errc::KernelSingular, "argument of the kernel log is zero");
  return detail::log_kernel_argument(arg);
}

/// d/dL of kernel_log: s sigma kt e^{-sigma L kt} / (1 - s e^{-sigma L kt}).
inline cplx kernel_log_dlz(BoundaryKind bc, double lz, cplx kt) {
  const auto tri = kernel_triple(bc);
  const double sd = static_cast<double>(tri.stretch);
  const auto arg = detail::kernel_argument(tri.sign, sd * lz * kt);
  if (arg.one_minus == cplx(0.0, 0.0)) throw Error(Errc::KernelSingular, "pressure kernel denominator is zero");
  // s e^{-z} = -w
  return -sd * kt * arg.w / arg.one_minus;
}

/// Whether k_tilde(-xi) equals conj(k_tilde(xi)) to machine tolerance.
inline bool conjugate_symmetry_check(double xi, double kperp2, double mass, double mu) noexcept {
  // A real argument is self-conjugate; on the cut the branch choice is a convention.
  if (xi == 0.0) return true;
  const cplx plus = k_tilde(xi, kperp2, mass, mu);
  const cplx minus = k_tilde(-xi, kperp2, mass, mu);
  const double scale = std::max(std::abs(plus), 1e-300);
  return std::abs(minus - std::conj(plus)) <= 8.0 * 2.220446049250313e-16 * scale;
}

}  // namespace casimir
