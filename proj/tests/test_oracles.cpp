#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "casimir/observables.hpp"
#include "casimir/oracles.hpp"
#include "gen.hpp"

using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool has(const LatticeResult& r, Errc c) { return std::find(r.warnings.begin(), r.warnings.end(), c) != r.warnings.end(); }

}  // namespace

TEST(FermiOracle, EmptySeaIsZero) {
  EXPECT_EQ(fermi_sea_oracle({{1.0, 1.0}, BoundaryKind::PBC, 3, 5.0}), 0.0);
  EXPECT_EQ(fermi_sea_oracle({{2.0, 0.5}, BoundaryKind::MIT, 1, 5.0}), 0.0);
}

TEST(FermiOracle, MatchesLifshitzSplit) {
  const auto s = sea_split({0.0, 1.0}, BoundaryKind::PBC, 3, 5.0, 0.0);
  EXPECT_LT(rel(fermi_sea_oracle({{0.0, 1.0}, BoundaryKind::PBC, 3, 5.0}), s.fermi), 1e-3);
}

TEST(FermiOracle, OneDimensionalClosedForm) {
  // d = 1, PBC, M = 0: E = -(4 pi / L) f (1 - f), f = frac(mu L / 2 pi).
  gen::for_all(200, 51, [](gen::Rng& r, int i) {
    const double mu = r.uniform(0.1, 3.0), lz = r.uniform(0.5, 40.0);
    const double x = mu * lz / (2 * pi);
    const double f = x - std::floor(x);
    const double want = -4 * pi / lz * f * (1 - f);
    ASSERT_NEAR(fermi_sea_oracle({{0.0, mu}, BoundaryKind::PBC, 1, lz}), want, 1e-12 * (1 + std::abs(want))) << i;
  });
}

TEST(FermiOracle, JumpsWhereALevelCrosses) {
  // The d = 1 energy has a kink at L = 2 pi: slopes on the two sides differ.
  const double l = 2 * pi, h = 1e-4;
  auto e = [](double lz) { return fermi_sea_oracle({{0.0, 1.0}, BoundaryKind::PBC, 1, lz}); };
  const double left = (e(l - h) - e(l - 2 * h)) / h;
  const double right = (e(l + 2 * h) - e(l + h)) / h;
  EXPECT_GT(std::abs(right - left), 0.5);
  EXPECT_EQ(occupied_mode_count({0.0, 1.0}, BoundaryKind::PBC, l - 1e-9), 1);
  EXPECT_EQ(occupied_mode_count({0.0, 1.0}, BoundaryKind::PBC, l + 1e-9), 2);
}

TEST(FermiOracle, ModeCountMatchesFloorFormula) {
  gen::for_all(500, 52, [](gen::Rng& r, int i) {
    const FieldSpec f{r.uniform(0.0, 1.0), r.uniform(1.0, 3.0)};
    const double lz = r.uniform(0.3, 60.0);
    const int want = static_cast<int>(std::floor(lz * f.fermi_momentum() / (2 * pi))) + 1;
    ASSERT_EQ(occupied_mode_count(f, BoundaryKind::PBC, lz), want) << i;
  });
  EXPECT_EQ(occupied_mode_count({1.0, 0.5}, BoundaryKind::PBC, 3.0), 0);
}

TEST(FermiOracle, HigherDimensionUsesQuadrature) {
  const FieldSpec f{0.0, 1.0};
  const double e = casimir_energy_T0(f, BoundaryKind::PBC, 4, 4.0, {1e-10, 1e-15}).value -
                   casimir_energy_T0({0.0, 0.0}, BoundaryKind::PBC, 4, 4.0, {1e-10, 1e-15}).value;
  EXPECT_LT(rel(fermi_sea_oracle({f, BoundaryKind::PBC, 4, 4.0}), e), 1e-6);
}

TEST(LatticeOracle, ContinuumLimitAtZeroDensity) {
  // mu = 0: a -> 0 approaches 4 pi^2 / 90 monotonically.
  double prev = INFINITY;
  for (int n : {5, 10, 20, 40}) {
    const auto r = lattice_oracle({{0.0, 0.0}, n, 1.0 / n});
    const double dev = std::abs(r.value - 4 * pi * pi / 90);
    EXPECT_LT(dev, prev) << "N=" << n;
    prev = dev;
  }
  EXPECT_LT(prev / (4 * pi * pi / 90), 2e-3);
}

TEST(LatticeOracle, AgreesWithLifshitzAtLongSeparation) {
  const FieldSpec f{0.0, 1.0};
  const double a = 0.08;
  const int n = 250;
  const auto lat = lattice_oracle({f, n, a});
  const double lif = casimir_energy_T0(f, BoundaryKind::PBC, 3, n * a).value;
  EXPECT_TRUE(lat.converged);
  EXPECT_LT(rel(lat.value, lif), 2e-2);
  EXPECT_TRUE(lat.warnings.empty());
}

TEST(LatticeOracle, DeviationShrinksAsSpacingHalves) {
  const FieldSpec f{0.0, 1.0};
  const double lz = 10.08;
  const double lif = casimir_energy_T0(f, BoundaryKind::PBC, 3, lz).value;
  double prev = INFINITY;
  for (double a : {0.16, 0.08, 0.04}) {
    const double dev = std::abs(lattice_oracle({f, static_cast<int>(std::lround(lz / a)), a}).value - lif);
    EXPECT_LT(dev, prev) << "a=" << a;
    prev = dev;
  }
}

TEST(LatticeOracle, GappedLatticeIsZero) {
  // Every mode sits above mu, so sum and integral of the same constant cancel.
  const auto r = lattice_oracle({{0.0, 0.0}, 4, 0.5, 1.0, 1});
  EXPECT_TRUE(std::isfinite(r.value));
  const auto g = lattice_oracle({{5.0, 1.0}, 6, 0.2, 1.0, 1});
  const auto g0 = lattice_oracle({{5.0, 0.0}, 6, 0.2, 1.0, 1});
  EXPECT_NEAR(g.value, g0.value, 1e-12);
}

TEST(LatticeOracle, Warnings) {
  EXPECT_TRUE(has(lattice_oracle({{0.0, 1.0}, 20, 0.1, 0.0, 1}), Errc::DoublerWarning));
  EXPECT_TRUE(has(lattice_oracle({{0.0, 1.0}, 10, 0.5, 1.0, 1}), Errc::CoarseLattice));
  EXPECT_THROW(lattice_oracle({{0.0, 1.0}, 1, 0.1}), Error);
  EXPECT_THROW(lattice_oracle({{0.0, 1.0}, 10, 0.0}), Error);
  EXPECT_THROW(lattice_oracle({{0.0, 1.0}, 10, 0.1, 1.5}), Error);
}

TEST(WilsonDispersion, FermiCrossingsSolveTheDispersion) {
  gen::for_all(300, 53, [](gen::Rng& r, int i) {
    const detail::WilsonDispersion w{r.uniform(0.0, 0.5), r.uniform(0.02, 0.3), r.uniform(0.2, 1.0)};
    const double k2 = r.uniform(0.0, 1.0), mu = r.uniform(0.0, 3.0);
    for (double kz : w.fermi_crossings(k2, mu)) {
      ASSERT_GT(kz, 0.0) << i;
      ASSERT_LT(kz, pi / w.spacing) << i;
      ASSERT_NEAR(w(kz, k2), mu, 1e-9 * (1 + mu)) << i;
    }
  });
}
