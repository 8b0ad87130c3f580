#pragma once

// Domain types shared by every evaluator. Natural units (hbar = c = 1):
// masses, chemical potentials and temperatures are energies, lengths are
// inverse energies.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace casimir {

enum class Errc {
  NonPositiveSeparation,
  NegativeTemperature,
  EmptyFieldList,
  UnsupportedDimension,
  InvalidField,
  InvalidTolerances,
  KernelSingular,
  NonFiniteIntegrand,
  QuadratureFailure,
  MatsubaraNotConverged,
  NonPositiveArea,
  NoFermiSea,
  InsufficientSamples,
  NoOscillationDetected,
  DoublerWarning,
  CoarseLattice,
  InvalidLattice,
  InvalidSweep,
  IoFailure,
};

inline std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::NonPositiveSeparation: return "NonPositiveSeparation";
    case Errc::NegativeTemperature: return "NegativeTemperature";
    case Errc::EmptyFieldList: return "EmptyFieldList";
    case Errc::UnsupportedDimension: return "UnsupportedDimension";
    case Errc::InvalidField: return "InvalidField";
    case Errc::InvalidTolerances: return "InvalidTolerances";
    case Errc::KernelSingular: return "KernelSingular";
    case Errc::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::MatsubaraNotConverged: return "MatsubaraNotConverged";
    case Errc::NonPositiveArea: return "NonPositiveArea";
    case Errc::NoFermiSea: return "NoFermiSea";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::NoOscillationDetected: return "NoOscillationDetected";
    case Errc::DoublerWarning: return "DoublerWarning";
    case Errc::CoarseLattice: return "CoarseLattice";
    case Errc::InvalidLattice: return "InvalidLattice";
    case Errc::InvalidSweep: return "InvalidSweep";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// One Dirac species. `degeneracy` multiplies the boundary prefactor
/// (flavors, colors); 1 is a single four-component Dirac field.
struct FieldSpec {
  double mass = 0.0;
  double mu = 0.0;
  double degeneracy = 1.0;

  /// Fermi momentum sqrt(mu^2 - M^2), zero when there is no Fermi sea.
  double fermi_momentum() const noexcept {
    return mu > mass ? std::sqrt((mu - mass) * (mu + mass)) : 0.0;
  }
  bool has_fermi_sea() const noexcept { return mu > mass; }
};

enum class BoundaryKind { PBC, APBC, MIT, DIRICHLET_TYPE };

inline std::string_view to_string(BoundaryKind bc) {
  switch (bc) {
    case BoundaryKind::PBC: return "pbc";
    case BoundaryKind::APBC: return "apbc";
    case BoundaryKind::MIT: return "mit";
    case BoundaryKind::DIRICHLET_TYPE: return "dirichlet";
  }
  return "pbc";
}

inline BoundaryKind parse_boundary(std::string_view name) {
  if (name == "pbc") return BoundaryKind::PBC;
  if (name == "apbc") return BoundaryKind::APBC;
  if (name == "mit") return BoundaryKind::MIT;
  if (name == "dirichlet") return BoundaryKind::DIRICHLET_TYPE;
  throw std::invalid_argument("unknown boundary kind '" + std::string(name) + "'");
}

inline constexpr BoundaryKind kAllBoundaries[] = {BoundaryKind::PBC, BoundaryKind::APBC,
                                                  BoundaryKind::MIT,
                                                  BoundaryKind::DIRICHLET_TYPE};

struct Scenario {
  std::vector<FieldSpec> fields;
  BoundaryKind boundary = BoundaryKind::PBC;
  int dim = 3;
  double lz = 1.0;
  double temperature = 0.0;
};

/// Value of one evaluation: energy per unit transverse (d-1)-volume or a
/// pressure, depending on the evaluator.
struct EvalResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = true;
};

struct Tolerances {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::int64_t max_matsubara_terms = 1'000'000;
  double matsubara_tail_tol = 1e-12;
  int max_subdivisions = 2000;

  /// Requested error bound for a result of magnitude |value|.
  double bound(double value) const noexcept {
    return std::max(rel_tol * std::abs(value), abs_tol);
  }
};

inline void validate(const FieldSpec& f) {
  if (!(f.mass >= 0.0) || !std::isfinite(f.mass))
    throw Error(Errc::InvalidField, "mass must be finite and >= 0");
  if (!(f.mu >= 0.0) || !std::isfinite(f.mu))
    throw Error(Errc::InvalidField, "chemical potential must be finite and >= 0");
  if (!(f.degeneracy > 0.0) || !std::isfinite(f.degeneracy))
    throw Error(Errc::InvalidField, "degeneracy must be finite and > 0");
}

inline void validate(const Tolerances& t) {
  if (!(t.rel_tol > 0.0) || !(t.abs_tol > 0.0) || t.max_matsubara_terms <= 0 ||
      !(t.matsubara_tail_tol > 0.0) || t.max_subdivisions < 1)
    throw Error(Errc::InvalidTolerances, "all tolerances must be strictly positive");
}

inline void validate_separation(double lz) {
  if (!(lz > 0.0) || !std::isfinite(lz))
    throw Error(Errc::NonPositiveSeparation, "L_z must be finite and > 0");
}

inline void validate_dimension(int dim) {
  if (dim < 1) throw Error(Errc::UnsupportedDimension, "spatial dimension must be >= 1");
}

inline void validate_temperature(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(Errc::NegativeTemperature, "temperature must be finite and >= 0");
}

/// Returns the scenario unchanged if every invariant holds, throws otherwise.
inline const Scenario& validate_scenario(const Scenario& s) {
  validate_separation(s.lz);
  validate_temperature(s.temperature);
  if (s.fields.empty()) throw Error(Errc::EmptyFieldList, "at least one field is required");
  validate_dimension(s.dim);
  for (const auto& f : s.fields) validate(f);
  return s;
}

}  // namespace casimir
