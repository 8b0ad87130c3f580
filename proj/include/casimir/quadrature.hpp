#pragma once

// Numerical integration on finite and semi-infinite intervals.
//
// ADAPTIVE_SUBDIVISION is a globally adaptive 21-point Gauss-Kronrod scheme:
// all pieces of the domain share one priority queue ordered by local error,
// and the worst piece is bisected until the summed error meets the request.
// The semi-infinite tail [b, inf) is mapped to t in (0, 1] with
// x = b - 2 s ln(t) for decay scale s, so an x^n e^{-x/s} tail becomes
// t (ln t)^n and vanishes at t = 0.
// Nodes are interior to every piece, so no finite endpoint is ever sampled.
//
// DOUBLE_EXPONENTIAL delegates to Boost's tanh-sinh / exp-sinh rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "casimir/model.hpp"

namespace casimir {

enum class QuadratureMethod { ADAPTIVE_SUBDIVISION, DOUBLE_EXPONENTIAL };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::ADAPTIVE_SUBDIVISION;
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  double decay_scale = 1.0;

  double bound(double value) const noexcept {
    return std::max(rel_tol * std::abs(value), abs_tol);
  }
};

inline void validate(const QuadratureSpec& q) {
  if (!(q.rel_tol > 0.0) || !(q.abs_tol > 0.0) || q.max_subdivisions < 1 || !(q.decay_scale > 0.0))
    throw Error(Errc::InvalidTolerances, "quadrature tolerances and scales must be positive");
}

/// Integrand sample carrying a companion quantity that is integrated with the
/// same nodes but does not steer refinement (used for nested error budgets).
struct Sample {
  double value;
  double aux;
};

/// Integration result plus the integral of the companion channel.
struct QuadratureResult : EvalResult {
  double aux_integral = 0.0;
  int subdivisions = 0;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208532660441, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// 10-point Gauss weights for the odd-indexed Kronrod abscissae.
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651193};

template <class F>
Sample call(F& f, double x) {
  using R = std::invoke_result_t<F&, double>;
  Sample s;
  if constexpr (std::is_same_v<std::decay_t<R>, Sample>) {
    s = f(x);
  } else {
    s = Sample{static_cast<double>(f(x)), 0.0};
  }
  if (!std::isfinite(s.value) || !std::isfinite(s.aux)) {
    std::ostringstream os;
    os.precision(17);
    os << "integrand returned a non-finite value at x = " << x;
    throw Error(Errc::NonFiniteIntegrand, os.str());
  }
  return s;
}

/// A piece of the domain: finite [a, b] in x, or a tail in t in (0, 1].
struct Piece {
  bool tail;
  double origin;  // tail: x = origin - scale * ln(t), scale = 2 * decay_scale
  double scale;

  double x_of(double t) const noexcept { return tail ? origin - scale * std::log(t) : t; }
  double jacobian(double t) const noexcept { return tail ? scale / t : 1.0; }
};

struct Interval {
  double lo, hi;
  int piece;
  double result, error, aux;
};

template <class F>
Interval gk21(F& f, const Piece& piece, int index, double lo, double hi, std::int64_t& evals) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<double, 21> fv{};
  double resk = 0.0, resg = 0.0, resabs = 0.0, aux = 0.0;

  auto eval = [&](double t) {
    const Sample s = call(f, piece.x_of(t));
    const double j = piece.jacobian(t);
    return Sample{s.value * j, s.aux * j};
  };

  const Sample c = eval(center);
  fv[10] = c.value;
  resk = kWgk[10] * c.value;
  resabs = kWgk[10] * std::abs(c.value);
  aux = kWgk[10] * c.aux;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const Sample s1 = eval(center - dx);
    const Sample s2 = eval(center + dx);
    fv[j] = s1.value;
    fv[20 - j] = s2.value;
    resk += kWgk[j] * (s1.value + s2.value);
    resabs += kWgk[j] * (std::abs(s1.value) + std::abs(s2.value));
    aux += kWgk[j] * (s1.aux + s2.aux);
    if (j % 2 == 1) resg += kWg[j / 2] * (s1.value + s2.value);
  }
  evals += 21;

  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fv[10] - reskh);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - reskh) + std::abs(fv[20 - j] - reskh));

  const double ahalf = std::abs(half);
  double err = std::abs((resk - resg) * half);
  resasc *= ahalf;
  resabs *= ahalf;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Interval{lo, hi, index, resk * half, err, aux * half};
}

template <class F>
QuadratureResult adaptive(F& f, std::span<const Piece> pieces, std::span<const std::pair<double, double>> ranges,
                          const QuadratureSpec& spec) {
  auto worse = [](const Interval& a, const Interval& b) { return a.error < b.error; };
  std::priority_queue<Interval, std::vector<Interval>, decltype(worse)> heap(worse);
  std::vector<Interval> frozen;
  QuadratureResult out;
  std::int64_t evals = 0;

  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Interval iv = gk21(f, pieces[i], static_cast<int>(i), ranges[i].first, ranges[i].second, evals);
    total += iv.result;
    err += iv.error;
    heap.push(iv);
  }

  int subdivisions = 0;
  while (err > spec.bound(total) && subdivisions < spec.max_subdivisions && !heap.empty()) {
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const double width = worst.hi - worst.lo;
    const double mag = std::max(std::abs(worst.lo), std::abs(worst.hi));
    // Outermost child nodes must stay off the endpoints.
    const double edge = 0.25 * width * (1.0 - kXgk[0]);
    if (!(mid > worst.lo && mid < worst.hi) || width <= 64.0 * std::numeric_limits<double>::epsilon() * mag ||
        !(worst.lo + edge > worst.lo) || !(worst.hi - edge < worst.hi)) {
      frozen.push_back(worst);  // too narrow to split further
      continue;
    }
    const Piece& piece = pieces[worst.piece];
    Interval left = gk21(f, piece, worst.piece, worst.lo, mid, evals);
    Interval right = gk21(f, piece, worst.piece, mid, worst.hi, evals);
    total += left.result + right.result - worst.result;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }

  // Re-sum from scratch so the reported totals carry no incremental drift.
  total = 0.0;
  err = 0.0;
  double aux = 0.0;
  auto absorb = [&](const Interval& iv) {
    total += iv.result;
    err += iv.error;
    aux += iv.aux;
  };
  for (const auto& iv : frozen) absorb(iv);
  while (!heap.empty()) {
    absorb(heap.top());
    heap.pop();
  }
  out.value = total;
  out.abs_error_estimate = err;
  out.aux_integral = aux;
  out.evaluations = evals;
  out.subdivisions = subdivisions;
  out.converged = err <= spec.bound(total);
  return out;
}

/// Sorted, de-duplicated, strictly positive breakpoints.
inline std::vector<double> clean_breakpoints(std::span<const double> raw, double lo, double hi) {
  std::vector<double> b;
  for (double x : raw)
    if (std::isfinite(x) && x > lo && x < hi) b.push_back(x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double a, double c) { return std::abs(a - c) <= 1e-14 * std::max(std::abs(a), std::abs(c)); }),
          b.end());
  return b;
}

template <class F>
double plain_value(F& f, double x) {
  return call(f, x).value;
}

template <class F>
QuadratureResult double_exponential(F& f, std::span<const double> nodes, bool tail, const QuadratureSpec& spec) {
  // nodes: segment boundaries; when `tail` the last segment runs to infinity.
  QuadratureResult out;
  std::int64_t evals = 0;
  double total = 0.0, err = 0.0, l1 = 0.0, aux_rel = 0.0;
  auto wrapped = [&](double x) {
    ++evals;
    const Sample s = call(f, x);
    aux_rel = std::max(aux_rel, s.aux / std::max(std::abs(s.value), spec.abs_tol));
    return s.value;
  };
  const double tol = std::max(spec.rel_tol, 64.0 * std::numeric_limits<double>::epsilon());
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    boost::math::quadrature::tanh_sinh<double> ts;
    double e = 0.0, l = 0.0;
    const double a = nodes[i], b = nodes[i + 1];
    total += ts.integrate(
        [&](double x) {
          if (!(x > a && x < b)) return 0.0;
          return wrapped(x);
        },
        a, b, tol, &e, &l);
    err += e;
    l1 += l;
  }
  if (tail) {
    boost::math::quadrature::exp_sinh<double> es;
    double e = 0.0, l = 0.0;
    const double a = nodes.back();
    const double s = spec.decay_scale;
    total += s * es.integrate(
                     [&](double u) {
                       const double x = a + s * u;
                       if (!(x > a) || !std::isfinite(x)) return 0.0;
                       return wrapped(x);
                     },
                     0.0, std::numeric_limits<double>::infinity(), tol, &e, &l);
    err += s * e;
    l1 += s * l;
  }
  out.value = total;
  out.abs_error_estimate = err;
  out.aux_integral = aux_rel * l1;
  out.evaluations = evals;
  out.converged = err <= spec.bound(total);
  return out;
}

}  // namespace detail

/// Integral of f over (a, b) with optional interior breakpoints.
template <class F>
QuadratureResult integrate_interval(F&& f, double a, double b, const QuadratureSpec& spec,
                                    std::span<const double> breakpoints = {}) {
  validate(spec);
  if (!(b > a)) return QuadratureResult{};
  std::vector<double> nodes{a};
  for (double x : detail::clean_breakpoints(breakpoints, a, b)) nodes.push_back(x);
  nodes.push_back(b);
  if (spec.method == QuadratureMethod::DOUBLE_EXPONENTIAL) return detail::double_exponential(f, nodes, false, spec);
  std::vector<detail::Piece> pieces;
  std::vector<std::pair<double, double>> ranges;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    pieces.push_back({false, 0.0, 1.0});
    ranges.emplace_back(nodes[i], nodes[i + 1]);
  }
  return detail::adaptive(f, pieces, ranges, spec);
}

/// Integral of f over (lower, inf); f must decay at infinity. Breakpoints split
/// the finite part, the tail beyond the last one is mapped exponentially.
template <class F>
QuadratureResult integrate_semi_infinite(F&& f, const QuadratureSpec& spec, std::span<const double> breakpoints = {},
                                         double lower = 0.0) {
  validate(spec);
  std::vector<double> nodes{lower};
  for (double x : detail::clean_breakpoints(breakpoints, lower, std::numeric_limits<double>::infinity()))
    nodes.push_back(x);
  if (spec.method == QuadratureMethod::DOUBLE_EXPONENTIAL) return detail::double_exponential(f, nodes, true, spec);
  // The tail map has no resolution at its origin, so the lower limit always
  // sits on a plain finite piece.
  if (nodes.size() == 1) nodes.push_back(lower + spec.decay_scale);
  std::vector<detail::Piece> pieces;
  std::vector<std::pair<double, double>> ranges;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    pieces.push_back({false, 0.0, 1.0});
    ranges.emplace_back(nodes[i], nodes[i + 1]);
  }
  pieces.push_back({true, nodes.back(), 2.0 * spec.decay_scale});
  ranges.emplace_back(0.0, 1.0);
  return detail::adaptive(f, pieces, ranges, spec);
}

/// Which axis of an iterated integral failed to converge.
enum class FailedAxis { None, Outer, Inner, Both };

struct Quadrature2dResult : QuadratureResult {
  FailedAxis failed_axis = FailedAxis::None;
};

/// Iterated integral of f(x, y) over (0, inf)^2: outer x, inner y. The outer
/// rule targets half the requested error and the inner rule a tenth of that;
/// the reported error is the outer estimate plus the integrated inner estimates.
template <class F>
Quadrature2dResult integrate_2d_semi_infinite(F&& f, const QuadratureSpec& spec,
                                              std::span<const double> inner_breakpoints = {},
                                              std::span<const double> outer_breakpoints = {}) {
  validate(spec);
  QuadratureSpec outer = spec;
  outer.rel_tol *= 0.5;
  outer.abs_tol *= 0.5;
  QuadratureSpec inner = outer;
  inner.rel_tol /= 10.0;
  inner.abs_tol /= 10.0;
  std::int64_t inner_evals = 0;
  bool inner_ok = true;
  auto outer_fn = [&](double x) {
    auto g = [&](double y) { return f(x, y); };
    const QuadratureResult r = integrate_semi_infinite(g, inner, inner_breakpoints);
    inner_evals += r.evaluations;
    inner_ok = inner_ok && r.converged;
    return Sample{r.value, r.abs_error_estimate};
  };
  const QuadratureResult o = integrate_semi_infinite(outer_fn, outer, outer_breakpoints);
  Quadrature2dResult out;
  out.value = o.value;
  out.abs_error_estimate = o.abs_error_estimate + std::abs(o.aux_integral);
  out.aux_integral = o.aux_integral;
  out.evaluations = inner_evals;
  out.subdivisions = o.subdivisions;
  const bool outer_ok = out.abs_error_estimate <= spec.bound(out.value);
  out.converged = outer_ok && inner_ok;
  out.failed_axis = outer_ok ? (inner_ok ? FailedAxis::None : FailedAxis::Inner)
                             : (inner_ok ? FailedAxis::Outer : FailedAxis::Both);
  return out;
}

}  // namespace casimir
