#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "casimir/quadrature.hpp"

using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double zeta3 = 1.2020569031595942854;

struct Case {
  const char* name;
  std::function<double(double)> f;
  double exact;
};

// Semi-infinite corpus with closed forms.
std::vector<Case> corpus() {
  return {
      {"exp", [](double x) { return std::exp(-x); }, 1.0},
      {"log1mexp", [](double x) { return std::log(-std::expm1(-x)); }, -pi * pi / 6.0},
      {"gauss_moment", [](double x) { return x * std::exp(-x * x); }, 0.5},
      {"inv_sqrt", [](double x) { return std::exp(-x) / std::sqrt(x); }, std::sqrt(pi)},
      {"log_exp", [](double x) { return std::log(x) * std::exp(-x); }, -std::numbers::egamma},
      {"bose", [](double x) { return x * x / std::expm1(x); }, 2.0 * zeta3},
  };
}

QuadratureSpec tight(QuadratureMethod m = QuadratureMethod::ADAPTIVE_SUBDIVISION) {
  QuadratureSpec s;
  s.method = m;
  s.rel_tol = 1e-12;
  s.abs_tol = 1e-14;
  return s;
}

}  // namespace

TEST(SemiInfinite, SpecExamples) {
  const QuadratureSpec s = tight();
  EXPECT_NEAR(integrate_semi_infinite([](double x) { return std::exp(-x); }, s).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate_semi_infinite([](double x) { return std::log(-std::expm1(-x)); }, s).value, -pi * pi / 6.0,
              1e-10);
  EXPECT_NEAR(integrate_semi_infinite([](double x) { return x * std::exp(-x * x); }, s).value, 0.5, 1e-10);
}

TEST(SemiInfinite, CorpusAccuracyAndHonesty) {
  for (auto method : {QuadratureMethod::ADAPTIVE_SUBDIVISION, QuadratureMethod::DOUBLE_EXPONENTIAL}) {
    for (const auto& c : corpus()) {
      const auto r = integrate_semi_infinite(c.f, tight(method));
      EXPECT_TRUE(r.converged) << c.name;
      EXPECT_NEAR(r.value, c.exact, 1e-10 * std::max(1.0, std::abs(c.exact))) << c.name;
      EXPECT_LE(std::abs(r.value - c.exact), 10.0 * r.abs_error_estimate + 1e-15) << c.name;
    }
  }
}

TEST(SemiInfinite, DecayScaleAndBreakpoints) {
  QuadratureSpec s = tight();
  s.decay_scale = 1.0 / 40.0;
  const auto r = integrate_semi_infinite([](double x) { return 40.0 * std::exp(-40.0 * x); }, s);
  EXPECT_NEAR(r.value, 1.0, 1e-11);
  // Kink at x = 1.
  const std::vector<double> b{1.0};
  const auto k = integrate_semi_infinite([](double x) { return std::abs(x - 1.0) * std::exp(-x); }, tight(), b);
  EXPECT_NEAR(k.value, 2.0 / std::numbers::e, 1e-11);
}

TEST(SemiInfinite, NeverEvaluatesEndpoints) {
  for (auto method : {QuadratureMethod::ADAPTIVE_SUBDIVISION, QuadratureMethod::DOUBLE_EXPONENTIAL}) {
    bool hit_zero = false, hit_inf = false;
    integrate_semi_infinite(
        [&](double x) {
          hit_zero = hit_zero || x == 0.0;
          hit_inf = hit_inf || std::isinf(x);
          return std::log(-std::expm1(-x));
        },
        tight(method));
    EXPECT_FALSE(hit_zero);
    EXPECT_FALSE(hit_inf);
  }
}

TEST(SemiInfinite, MoreSubdivisionsNeverHurt) {
  for (const auto& c : corpus()) {
    QuadratureSpec s = tight();
    s.rel_tol = 1e-15;
    s.abs_tol = 1e-300;
    double prev = INFINITY;
    for (int n = 1; n <= 256; n *= 2) {
      s.max_subdivisions = n;
      const double err = std::abs(integrate_semi_infinite(c.f, s).value - c.exact);
      EXPECT_LE(err, prev * (1.0 + 1e-9) + 4e-16 * std::abs(c.exact)) << c.name << " n=" << n;
      prev = err;
    }
  }
}

TEST(SemiInfinite, SubdivisionLimitFlagsNonConvergence) {
  QuadratureSpec s = tight();
  s.rel_tol = 1e-15;
  s.abs_tol = 1e-300;
  s.max_subdivisions = 2;
  const auto r = integrate_semi_infinite([](double x) { return std::log(x) * std::exp(-x); }, s);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_GT(r.abs_error_estimate, 0.0);
}

TEST(SemiInfinite, NonFiniteIntegrandThrows) {
  try {
    integrate_semi_infinite([](double x) { return x > 1.0 ? NAN : 1.0; }, tight());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonFiniteIntegrand);
  }
}

TEST(SemiInfinite, InvalidSpecThrows) {
  QuadratureSpec s;
  s.rel_tol = 0.0;
  EXPECT_THROW(integrate_semi_infinite([](double x) { return std::exp(-x); }, s), Error);
  s = QuadratureSpec{};
  s.max_subdivisions = 0;
  EXPECT_THROW(integrate_semi_infinite([](double x) { return std::exp(-x); }, s), Error);
}

TEST(SemiInfinite, AuxChannelIntegratesAlongside) {
  const auto r = integrate_semi_infinite([](double x) { return Sample{std::exp(-x), 2.0 * std::exp(-2.0 * x)}; },
                                         tight());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(r.aux_integral, 1.0, 1e-8);
}

TEST(Interval, KnownIntegrals) {
  for (auto method : {QuadratureMethod::ADAPTIVE_SUBDIVISION, QuadratureMethod::DOUBLE_EXPONENTIAL}) {
    EXPECT_NEAR(integrate_interval([](double x) { return std::sqrt(x); }, 0.0, 1.0, tight(method)).value, 2.0 / 3.0,
                1e-12);
    EXPECT_NEAR(integrate_interval([](double x) { return std::sin(x); }, 0.0, pi, tight(method)).value, 2.0, 1e-12);
  }
  EXPECT_EQ(integrate_interval([](double) { return 1.0; }, 1.0, 1.0, tight()).value, 0.0);
}

TEST(Iterated, SpecExamples) {
  QuadratureSpec s = tight();
  s.rel_tol = 1e-10;
  const auto a = integrate_2d_semi_infinite([](double x, double y) { return std::exp(-x - y); }, s);
  EXPECT_NEAR(a.value, 1.0, 1e-9);
  EXPECT_EQ(a.failed_axis, FailedAxis::None);
  const auto b = integrate_2d_semi_infinite([](double x, double y) { return std::exp(-x * x - y * y); }, s);
  EXPECT_NEAR(b.value, pi / 4.0, 1e-9);
  // Polar reduction: (1/2pi)(pi/2) Int r ln(1 - e^{-r}) dr = -zeta(3)/4.
  const auto c = integrate_2d_semi_infinite(
      [](double x, double y) { return std::log(-std::expm1(-std::hypot(x, y))) / (2.0 * pi); }, s);
  EXPECT_NEAR(c.value, -zeta3 / 4.0, 1e-8);
  EXPECT_LE(std::abs(c.value + zeta3 / 4.0), 10.0 * c.abs_error_estimate + 1e-15);
}

TEST(Iterated, ReportsFailingAxis) {
  QuadratureSpec s = tight();
  s.rel_tol = 1e-15;
  s.abs_tol = 1e-300;
  s.max_subdivisions = 2;
  const auto r = integrate_2d_semi_infinite(
      [](double x, double y) { return std::log(x) * std::exp(-x) * std::log(y) * std::exp(-y); }, s);
  EXPECT_FALSE(r.converged);
  EXPECT_NE(r.failed_axis, FailedAxis::None);
}
