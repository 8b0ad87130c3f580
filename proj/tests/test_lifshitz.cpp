#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "casimir/lifshitz.hpp"
#include "gen.hpp"

using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double zeta3 = 1.2020569031595942854;
constexpr double zeta5 = 1.0369277551433699263;

const FieldSpec kVacuum{0.0, 0.0};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(RadialReduction, Table) {
  EXPECT_FALSE(radial_reduction(1).has_transverse);
  EXPECT_DOUBLE_EQ(radial_reduction(2).angular_factor, 1.0 / pi);
  EXPECT_DOUBLE_EQ(radial_reduction(3).angular_factor, 1.0 / (2.0 * pi));
  // Omega_3 / (2 pi)^3 = 4 pi / (8 pi^3)
  EXPECT_NEAR(radial_reduction(4).angular_factor, 1.0 / (2.0 * pi * pi), 1e-15);
  EXPECT_THROW(radial_reduction(0), Error);
}

TEST(EnergyT0, MasslessVacuumCoefficients) {
  for (double lz : {0.5, 1.0, 3.0, 20.0}) {
    EXPECT_LT(rel(casimir_energy_T0(kVacuum, BoundaryKind::PBC, 3, lz).value * std::pow(lz, 3), 4 * pi * pi / 90), 1e-6);
    EXPECT_LT(rel(casimir_energy_T0(kVacuum, BoundaryKind::PBC, 2, lz).value * lz * lz, 2 * zeta3 / pi), 1e-6);
    EXPECT_LT(rel(casimir_energy_T0(kVacuum, BoundaryKind::PBC, 1, lz).value * lz, 2 * pi / 3), 1e-6);
  }
}

TEST(EnergyT0, GeneralDimension) {
  // E L^d = 4 Gamma((d+1)/2) zeta(d+1) / pi^((d+1)/2); at d = 4 that is 3 zeta(5) / pi^2.
  const auto r = casimir_energy_T0(kVacuum, BoundaryKind::PBC, 4, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(rel(r.value, 3 * zeta5 / (pi * pi)), 1e-6);
}

TEST(EnergyT0, AntiperiodicVacuum) {
  // Antiperiodic modes: -(7/8) of the periodic value at d = 3.
  const auto r = casimir_energy_T0(kVacuum, BoundaryKind::APBC, 3, 1.0);
  EXPECT_LT(rel(r.value, -7.0 / 8.0 * 4 * pi * pi / 90), 1e-6);
}

TEST(PressureT0, MasslessVacuum) {
  const auto r = casimir_pressure_T0(kVacuum, BoundaryKind::PBC, 3, 1.0);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(rel(r.value, 2 * pi * pi / 15), 1e-6);
  EXPECT_LT(rel(casimir_pressure_T0(kVacuum, BoundaryKind::PBC, 3, 2.0).value * 16.0, 2 * pi * pi / 15), 1e-6);
}

TEST(EnergyT0, PositiveAtZeroDensity) {
  for (double lz : {0.2, 1.0, 4.0, 25.0}) {
    for (double m : {0.0, 0.5}) {
      EXPECT_GT(casimir_energy_T0({m, 0.0}, BoundaryKind::PBC, 3, lz).value, 0.0);
      EXPECT_GT(casimir_pressure_T0({m, 0.0}, BoundaryKind::PBC, 3, lz).value, 0.0);
    }
  }
}

// Fermi-sea parts E(mu) - E(0) from a 30-digit mode-sum evaluation.
TEST(EnergyT0, FrozenFermiParts) {
  struct Ref {
    double mass, mu;
    int dim;
    double lz;
    BoundaryKind bc;
    double fermi;
  };
  const Ref refs[] = {
      {0.0, 1.0, 3, 5.0, BoundaryKind::PBC, -0.010834487846324374},
      {0.5, 1.0, 3, 5.0, BoundaryKind::MIT, -0.00047957253275788964},
      {0.0, 1.0, 1, 5.0, BoundaryKind::PBC, -0.40845056908104664},
      {0.0, 1.0, 2, 5.0, BoundaryKind::PBC, -0.053051647697298445},
      {0.5, 1.0, 2, 10.0, BoundaryKind::APBC, -0.00023131196368222441},
      {0.0, 1.0, 3, 20.0, BoundaryKind::APBC, -0.00038934570467679982},
      {0.3, 1.0, 3, 7.5, BoundaryKind::DIRICHLET_TYPE, 0.00035884319476935217},
  };
  const Tolerances tol{1e-10, 1e-15};
  for (const auto& r : refs) {
    const double e = casimir_energy_T0({r.mass, r.mu}, r.bc, r.dim, r.lz, tol).value -
                     casimir_energy_T0({r.mass, 0.0}, r.bc, r.dim, r.lz, tol).value;
    EXPECT_LT(rel(e, r.fermi), 1e-7) << to_string(r.bc) << " d=" << r.dim << " L=" << r.lz;
  }
}

TEST(EnergyT0, NoFermiSeaBelowThreshold) {
  const Tolerances tol{1e-12, 1e-12};
  gen::for_all(8, 31, [&](gen::Rng& r, int i) {
    const double m = r.uniform(0.2, 2.0), mu = r.uniform(0.0, m), lz = r.uniform(0.5, 10.0);
    const auto bc = r.boundary();
    const int d = r.integer(1, 3);
    const double e = casimir_energy_T0({m, mu}, bc, d, lz, tol).value;
    const double e0 = casimir_energy_T0({m, 0.0}, bc, d, lz, tol).value;
    ASSERT_LE(std::abs(e - e0), 2.0 * tol.abs_tol) << "case " << i;
    const double p = casimir_pressure_T0({m, mu}, bc, d, lz, tol).value;
    const double p0 = casimir_pressure_T0({m, 0.0}, bc, d, lz, tol).value;
    ASSERT_LE(std::abs(p - p0), 2.0 * tol.abs_tol + 1e-8 * std::abs(p0)) << "case " << i;
  });
}

TEST(EnergyT0, MitIsApbcAtTwiceTheSeparation) {
  gen::for_all(6, 32, [](gen::Rng& r, int i) {
    const FieldSpec f{r.uniform(0.0, 1.0), r.uniform(0.0, 2.0)};
    const int d = r.integer(1, 3);
    const double lz = r.uniform(0.5, 12.0);
    const double mit = casimir_energy_T0(f, BoundaryKind::MIT, d, lz).value;
    const double apbc = casimir_energy_T0(f, BoundaryKind::APBC, d, 2.0 * lz).value;
    ASSERT_LT(rel(mit, apbc / 2.0), 1e-10) << "case " << i;
    const double pm = casimir_pressure_T0(f, BoundaryKind::MIT, d, lz).value;
    const double pa = casimir_pressure_T0(f, BoundaryKind::APBC, d, 2.0 * lz).value;
    ASSERT_LT(rel(pm, pa), 1e-10) << "case " << i;
  });
}

TEST(EnergyT0, ImaginaryPartCancels) {
  for (auto bc : kAllBoundaries) {
    const auto r = imaginary_residual({0.2, 1.0}, bc, 3, 4.0);
    EXPECT_LE(std::abs(r.value), 1e-10) << to_string(bc);
  }
  EXPECT_LE(std::abs(imaginary_residual({0.0, 1.0}, BoundaryKind::PBC, 1, 3.0).value), 1e-10);
}

TEST(EnergyT0, ErrorsPropagate) {
  EXPECT_THROW(casimir_energy_T0({0.0, 1.0}, BoundaryKind::PBC, 3, 0.0), Error);
  EXPECT_THROW(casimir_energy_T0({0.0, 1.0}, BoundaryKind::PBC, 0, 1.0), Error);
  EXPECT_THROW(casimir_energy({0.0, 1.0}, BoundaryKind::PBC, 3, 1.0, -1.0), Error);
  EXPECT_THROW(casimir_energy_T({0.0, 1.0}, BoundaryKind::PBC, 3, 1.0, 0.0), Error);
}

TEST(EnergyT0, ConvergedResultsRespectTheirBound) {
  gen::for_all(10, 33, [](gen::Rng& r, int i) {
    const Tolerances tol;
    const FieldSpec f{r.uniform(0.0, 1.0), r.uniform(0.0, 2.0)};
    const auto e = casimir_energy_T0(f, r.boundary(), r.integer(1, 3), r.uniform(0.5, 20.0), tol);
    ASSERT_TRUE(e.converged) << "case " << i;
    ASSERT_LE(e.abs_error_estimate, tol.bound(e.value)) << "case " << i;
    ASSERT_GT(e.evaluations, 0);
  });
}

TEST(EnergyT, LowTemperatureLimit) {
  const FieldSpec f{0.0, 1.0};
  const double e0 = casimir_energy_T0(f, BoundaryKind::PBC, 3, 5.0).value;
  double prev = INFINITY;
  for (double t : {0.02, 0.01, 0.002}) {
    const auto r = casimir_energy_T(f, BoundaryKind::PBC, 3, 5.0, t);
    EXPECT_TRUE(r.converged);
    const double dev = rel(r.value, e0);
    EXPECT_LT(dev, prev) << "T=" << t;
    prev = dev;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(EnergyT, VacuumNearZeroTemperature) {
  const auto e = casimir_energy_T(kVacuum, BoundaryKind::PBC, 3, 1.0, 0.01);
  EXPECT_LT(rel(e.value, 4 * pi * pi / 90), 1e-2);
  const auto p = casimir_pressure_T(kVacuum, BoundaryKind::PBC, 3, 1.0, 0.01);
  EXPECT_LT(rel(p.value, 2 * pi * pi / 15), 1e-2);
}

TEST(PressureT, MatchesZeroTemperatureAndStaysFinite) {
  const FieldSpec f{0.0, 1.0};
  const double p0 = casimir_pressure_T0(f, BoundaryKind::PBC, 3, 5.0).value;
  EXPECT_LT(rel(casimir_pressure_T(f, BoundaryKind::PBC, 3, 5.0, 0.002).value, p0), 1e-2);
  for (double t : {1e-3, 0.1, 1.0, 10.0}) {
    const auto r = casimir_pressure_T(f, BoundaryKind::MIT, 2, 3.0, t);
    EXPECT_TRUE(std::isfinite(r.value)) << "T=" << t;
    EXPECT_TRUE(r.converged) << "T=" << t;
  }
}

TEST(EnergyT, TermLimitFlagsNonConvergence) {
  Tolerances tol;
  tol.max_matsubara_terms = 3;
  const auto r = casimir_energy_T({0.0, 1.0}, BoundaryKind::PBC, 3, 5.0, 0.001, tol);
  EXPECT_FALSE(r.converged);
}

TEST(EnergyT, HighTemperatureSuppresses) {
  const FieldSpec f{0.0, 1.0};
  for (double lz : {3.0, 8.0, 15.0}) {
    EXPECT_LT(std::abs(casimir_energy_T(f, BoundaryKind::PBC, 3, lz, 1.0).value),
              std::abs(casimir_energy_T0(f, BoundaryKind::PBC, 3, lz).value))
        << "L=" << lz;
  }
}
