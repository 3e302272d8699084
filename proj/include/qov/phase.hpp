#pragma once

#include <cstdint>
#include <vector>

#include "qov/fock.hpp"
#include "qov/scheme.hpp"

namespace qov {

// Truncated London phase state |phi; N> = (N+1)^{-1/2} sum_n e^{i n phi} |n>.
FockVector london_phase_state(const FockSpace& space, int n_trunc, double phi);

// Squared overlap of |phi; N> with the two-level superposition
// (|0> + z|1>) / sqrt(1+|z|^2):
//   (1 + |z|^2 + 2|z| cos(phi - psi)) / ((N+1)(1+|z|^2)),  z = |z| e^{i psi}.
double canonical_overlap_formula(Complex z, double phi, int n_trunc);

// Single-stage scheme measuring the overlap with |phi; 1>:
// alpha = -(r*/t*) e^{i phi}.
Scheme canonical_phase_scheme(double phi, const BeamSplitter& bs);

// Efficiency of that scheme, 2 |r|^2 e^{-|r/t|^2}. Maximal at
// |t|^2 = (sqrt(5)-1)/2 ~ 0.618 with value ~ 0.412.
double canonical_efficiency(const BeamSplitter& bs);

// Canonical phase distribution of rho through the measurement pipeline:
// for each grid phi, the scheme for |phi; N> is applied and
// prob(phi) = (N+1)/(2 pi) * p(phi)/efficiency. The phi-dependence enters
// only as a rigid rotation of the zeros, so the cascade is designed once at
// phi = 0 and the rotation is moved onto rho (exact identity, tested against
// the design-per-point route). rho must live within the first N+1 levels.
std::vector<double> canonical_phase_distribution(
    const FockOperator& rho, int n_trunc, const BeamSplitter& bs,
    const std::vector<double>& phi_grid);

// Parameter set of a truncated trigonometric (cosine/sine) phase state.
struct PhasePoint {
  double phi = 0.0;
  double chi = 0.0;
  int n_trunc = 1;
};

// Normalization C(phi; N) of the trigonometric phase state; purely a function
// of phi and N. Throws DegeneratePhase where the state degenerates
// (sin(phi) -> 0 or vanishing norm braces).
Complex trig_normalization(const PhasePoint& pt);

// |phi, chi; N> = C (e^{i phi} |chi+phi; N> - e^{-i phi} |chi-phi; N>).
// chi = 0 gives the truncated cosine-phase states, chi = pi/2 the sine ones.
FockVector trig_phase_state(const FockSpace& space, const PhasePoint& pt);

// Squared overlap with the two-level superposition (|0> + z|1>)/sqrt(1+|z|^2):
//   4|C|^2 / ((N+1)(1+|z|^2)) *
//   [sin^2 phi + 2|z| cos(psi - chi) sin phi sin 2phi + |z|^2 sin^2 2phi].
double trig_overlap_formula(Complex z, const PhasePoint& pt);

// Single-stage scheme for the N = 1 trigonometric state:
// alpha = -(r*/(2 t* cos phi)) e^{i chi}.
Scheme trig_phase_scheme(const PhasePoint& pt, const BeamSplitter& bs);

// Its efficiency (1 - cos phi cos 3phi)/sin^2(2phi) |r|^2 e^{-|r/(2t cos phi)|^2}.
double trig_efficiency(double phi, const BeamSplitter& bs);

// Trigonometric phase distribution over phi at fixed chi, N = 1 pipeline:
// prob(phi) = (N+1)/(2 pi |C|^2) * overlap. Grid points whose stage amplitude
// would exceed alpha_cap (phi near pi/2, where |alpha| diverges) are computed
// through the direct state-overlap route instead and flagged.
struct TrigDistribution {
  std::vector<double> prob;
  std::vector<std::uint8_t> via_measurement;
};
TrigDistribution trig_distribution(const FockOperator& rho, double chi,
                                   const BeamSplitter& bs,
                                   const std::vector<double>& phi_grid,
                                   double alpha_cap = 4.0);

// Transmittance maximizing the trig-scheme efficiency at given phi:
// |t|^2 = 2 / (1 + sqrt(1 + 16 cos^2 phi)) (the stable rationalized form;
// equals (sqrt(17)-1)/8 at phi = 0 and tends to 1 as cos phi -> 0).
double optimal_transmittance(double phi);

// n midpoints of [a, b): a + (i + 1/2) (b-a)/n. Used for phase grids so
// interval endpoints (often singular) are never sampled.
std::vector<double> midpoint_grid(double a, double b, int n);

}  // namespace qov
