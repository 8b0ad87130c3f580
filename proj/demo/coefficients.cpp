// Prints the massless vacuum coefficients for d = 1, 2, 3 and a short
// stretch of the oscillating C3 at mu = 1.

#include <cstdio>

#include "casimir/observables.hpp"

int main() {
  using namespace casimir;
  for (int d : {1, 2, 3}) {
    const auto c = casimir_coefficient({0.0, 0.0}, BoundaryKind::PBC, d, 1.0, 0.0);
    std::printf("d=%d  E*L^d = %.10f  P*L^(d+1) = %.10f\n", d, c.c_energy, c.c_pressure);
  }

  std::printf("\n  L      C3(mu=1)     fermi part\n");
  const FieldSpec field{0.0, 1.0};
  for (double lz = 2.0; lz <= 14.0; lz += 1.0) {
    const auto c = casimir_coefficient(field, BoundaryKind::PBC, 3, lz, 0.0);
    const auto s = sea_split(field, BoundaryKind::PBC, 3, lz, 0.0);
    std::printf("%5.1f  %+.6f  %+.6e\n", lz, c.c_energy, s.fermi);
  }
  std::printf("\npredicted period: %.6f\n", predicted_period(field, BoundaryKind::PBC));
}
