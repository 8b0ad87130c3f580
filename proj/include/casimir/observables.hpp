#pragma once

// Quantities derived from the Lifshitz evaluators, and analyses of sampled
// curves (periods, envelopes, jumps).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "casimir/dispersion.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/model.hpp"

namespace casimir {

struct CoefficientResult {
  double c_energy = 0.0;    // E * L^d
  double c_pressure = 0.0;  // P * L^(d+1)
  double c_energy_err = 0.0;
  double c_pressure_err = 0.0;
  double lz = 0.0;
  int d = 3;
  bool converged = true;
};

inline CoefficientResult casimir_coefficient(const FieldSpec& field, BoundaryKind bc, int d, double lz,
                                             double temperature, const Tolerances& tol = {}) {
  const EvalResult e = casimir_energy(field, bc, d, lz, temperature, tol);
  const EvalResult p = casimir_pressure(field, bc, d, lz, temperature, tol);
  const double ld = std::pow(lz, d);
  return {e.value * ld,           p.value * ld * lz, e.abs_error_estimate * ld, p.abs_error_estimate * ld * lz,
          lz,                     d,                 e.converged && p.converged};
}

/// Force on a plate of transverse (d-1)-volume `area`.
inline EvalResult casimir_force(const FieldSpec& field, BoundaryKind bc, int d, double lz, double area,
                                double temperature, const Tolerances& tol = {}) {
  if (!(area > 0.0) || !std::isfinite(area)) throw Error(Errc::NonPositiveArea, "transverse area must be > 0");
  EvalResult p = casimir_pressure(field, bc, d, lz, temperature, tol);
  p.value *= area;
  p.abs_error_estimate *= area;
  return p;
}

/// Total energy split into the mu = 0 (Dirac sea) part and the remainder.
struct SeaSplit {
  double total = 0.0;
  double dirac = 0.0;
  double fermi = 0.0;
  double total_err = 0.0;
  double dirac_err = 0.0;
  bool converged = true;

  double fermi_err() const noexcept { return std::hypot(total_err, dirac_err); }
};

inline SeaSplit sea_split(const FieldSpec& field, BoundaryKind bc, int d, double lz, double temperature,
                          const Tolerances& tol = {}) {
  FieldSpec vacuum = field;
  vacuum.mu = 0.0;
  const EvalResult total = casimir_energy(field, bc, d, lz, temperature, tol);
  const EvalResult dirac = field.mu == 0.0 ? total : casimir_energy(vacuum, bc, d, lz, temperature, tol);
  SeaSplit s;
  s.total = total.value;
  s.dirac = dirac.value;
  s.fermi = total.value - dirac.value;
  s.total_err = total.abs_error_estimate;
  s.dirac_err = field.mu == 0.0 ? 0.0 : dirac.abs_error_estimate;
  s.converged = total.converged && dirac.converged;
  return s;
}

inline EvalResult multi_field_energy(std::span<const FieldSpec> fields, BoundaryKind bc, int d, double lz,
                                     double temperature, const Tolerances& tol = {}) {
  if (fields.empty()) throw Error(Errc::EmptyFieldList, "at least one field is required");
  EvalResult out;
  for (const auto& f : fields) {
    const EvalResult e = casimir_energy(f, bc, d, lz, temperature, tol);
    out.value += e.value;
    out.abs_error_estimate = std::hypot(out.abs_error_estimate, e.abs_error_estimate);
    out.evaluations += e.evaluations;
    out.converged = out.converged && e.converged;
  }
  return out;
}

/// Oscillation period 2 pi / (sigma sqrt(mu^2 - M^2)) of the Fermi-sea part.
inline double predicted_period(const FieldSpec& field, BoundaryKind bc) {
  if (!field.has_fermi_sea()) throw Error(Errc::NoFermiSea, "mu <= M: no oscillation");
  return 2.0 * std::numbers::pi / (kernel_triple(bc).stretch * field.fermi_momentum());
}

/// 1 / L_beat = |1 / L_osc(f1) - 1 / L_osc(f2)|; nullopt if the periods coincide.
inline std::optional<double> predicted_beat_period(const FieldSpec& f1, const FieldSpec& f2,
                                                   BoundaryKind bc = BoundaryKind::PBC) {
  const double inv = std::abs(1.0 / predicted_period(f1, bc) - 1.0 / predicted_period(f2, bc));
  if (inv == 0.0) return std::nullopt;
  return 1.0 / inv;
}

struct PeriodEstimate {
  double period = 0.0;
  double std_error = 0.0;
  int maxima = 0;
};

namespace detail {

inline void check_series(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw Error(Errc::InsufficientSamples, "abscissa and ordinate lengths differ");
  if (x.size() < min_points) throw Error(Errc::InsufficientSamples, "series too short");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw Error(Errc::InsufficientSamples, "abscissae must be strictly increasing");
}

/// Vertex of the parabola through three neighbouring samples.
inline std::pair<double, double> parabolic_peak(std::span<const double> x, std::span<const double> y, std::size_t i) {
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (!(curv < 0.0)) return {x1, y1};
  const double xv = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
  if (!(xv > x0 && xv < x2)) return {x1, y1};
  const double yv = y1 + d01 * (xv - x1) + curv * (xv - x0) * (xv - x1);
  return {xv, yv};
}

}  // namespace detail

/// Refined positions and heights of the interior local maxima of y(x).
inline std::vector<std::pair<double, double>> local_maxima(std::span<const double> x, std::span<const double> y) {
  detail::check_series(x, y, 3);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i)
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) out.push_back(detail::parabolic_peak(x, y, i));
  return out;
}

/// Mean spacing of successive interior maxima. The series must span at least
/// three periods with at least 20 samples per period.
inline PeriodEstimate measure_period(std::span<const double> x, std::span<const double> y) {
  detail::check_series(x, y, 60);
  const auto peaks = local_maxima(x, y);
  if (peaks.size() < 2) throw Error(Errc::NoOscillationDetected, "fewer than two interior maxima");
  std::vector<double> gaps;
  for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i].first - peaks[i - 1].first);
  const double n = static_cast<double>(gaps.size());
  const double mean = (peaks.back().first - peaks.front().first) / n;
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var = gaps.size() > 1 ? var / (n - 1.0) : 0.0;

  const double span = x.back() - x.front();
  const double spacing = span / static_cast<double>(x.size() - 1);
  if (span < 3.0 * mean) throw Error(Errc::InsufficientSamples, "series covers fewer than three periods");
  if (mean < 20.0 * spacing) throw Error(Errc::InsufficientSamples, "fewer than 20 samples per period");
  return {mean, std::sqrt(var / n), static_cast<int>(peaks.size())};
}

/// Power-law decay exponent of |y| from its local extrema: the negated
/// least-squares slope of log|extremum| against log x.
inline double measure_envelope_exponent(std::span<const double> x, std::span<const double> y) {
  detail::check_series(x, y, 3);
  std::vector<double> mag(y.size());
  std::transform(y.begin(), y.end(), mag.begin(), [](double v) { return std::abs(v); });
  std::vector<double> lx, ly;
  for (const auto& [px, py] : local_maxima(x, mag)) {
    if (py > 0.0) {
      lx.push_back(std::log(px));
      ly.push_back(std::log(py));
    }
  }
  if (lx.size() < 5) throw Error(Errc::InsufficientSamples, "need at least five extrema");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return -sxy / sxx;
}

namespace detail {

inline std::vector<std::pair<double, double>> local_minima(std::span<const double> x, std::span<const double> y) {
  std::vector<double> neg(y.size());
  std::transform(y.begin(), y.end(), neg.begin(), [](double v) { return -v; });
  auto out = local_maxima(x, neg);
  for (auto& p : out) p.second = -p.second;
  return out;
}

inline double interpolate(const std::vector<std::pair<double, double>>& nodes, double x) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), x, [](const auto& n, double v) { return n.first < v; });
  if (it == nodes.begin()) return it->second;
  if (it == nodes.end()) return nodes.back().second;
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace detail

/// Beat period of a two-tone signal. The carrier amplitude is taken at each
/// carrier maximum as its height above the interpolated lower envelope; the
/// beat is the spacing of that amplitude's own maxima and minima. Scale a
/// decaying series (e.g. by L^((d+1)/2)) before calling.
inline PeriodEstimate measure_beat_period(std::span<const double> x, std::span<const double> y) {
  detail::check_series(x, y, 60);
  const auto upper = local_maxima(x, y);
  const auto lower = detail::local_minima(x, y);
  if (upper.size() < 5 || lower.size() < 2) throw Error(Errc::NoOscillationDetected, "too few carrier extrema");
  std::vector<double> ax, ay;
  for (const auto& [px, py] : upper) {
    if (px < lower.front().first || px > lower.back().first) continue;
    ax.push_back(px);
    ay.push_back(py - detail::interpolate(lower, px));
  }
  if (ax.size() < 3) throw Error(Errc::NoOscillationDetected, "too few carrier extrema");

  std::vector<double> gaps;
  int count = 0;
  for (const auto& extrema : {local_maxima(ax, ay), detail::local_minima(ax, ay)}) {
    count += static_cast<int>(extrema.size());
    for (std::size_t i = 1; i < extrema.size(); ++i) gaps.push_back(extrema[i].first - extrema[i - 1].first);
  }
  if (gaps.size() < 2) throw Error(Errc::InsufficientSamples, "series covers too few beat periods");
  const double n = static_cast<double>(gaps.size());
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  return {mean, std::sqrt(var / (n - 1.0) / n), count};
}

/// Indices i such that y jumps between samples i and i+1: the step exceeds
/// `factor` times both neighbouring steps.
inline std::vector<std::size_t> detect_jumps(std::span<const double> x, std::span<const double> y,
                                             double factor = 10.0) {
  detail::check_series(x, y, 4);
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 2 < y.size(); ++i) {
    const double step = std::abs(y[i + 1] - y[i]);
    const double left = std::abs(y[i] - y[i - 1]);
    const double right = std::abs(y[i + 2] - y[i + 1]);
    if (step > factor * std::max(left, right)) out.push_back(i);
  }
  return out;
}

/// Half the peak-to-peak range of y in consecutive windows of width `window`,
/// starting at x.front(); a trailing partial window is dropped.
inline std::vector<double> window_amplitudes(std::span<const double> x, std::span<const double> y, double window) {
  detail::check_series(x, y, 2);
  std::vector<double> out;
  double start = x.front();
  while (start + window <= x.back()) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < start || x[i] >= start + window) continue;
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
    }
    out.push_back(0.5 * (hi - lo));
    start += window;
  }
  return out;
}

/// Central difference -[E(L(1+h)) - E(L(1-h))] / (2 L h), with quadrature
/// tolerances 100 times tighter than `tol`.
inline double numeric_pressure(const FieldSpec& field, BoundaryKind bc, int d, double lz, double temperature,
                               const Tolerances& tol = {}, double step = 1e-4) {
  validate_separation(lz * (1.0 - step));
  Tolerances tight = tol;
  tight.rel_tol /= 100.0;
  tight.abs_tol /= 100.0;
  const double up = casimir_energy(field, bc, d, lz * (1.0 + step), temperature, tight).value;
  const double down = casimir_energy(field, bc, d, lz * (1.0 - step), temperature, tight).value;
  return -(up - down) / (2.0 * lz * step);
}

}  // namespace casimir
