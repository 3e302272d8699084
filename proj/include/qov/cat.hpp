#pragma once

#include <utility>

#include "qov/fock.hpp"
#include "qov/scheme.hpp"

namespace qov {

// Parameters of a cat-like state |Psi_n(beta)> = N^{-1/2} (a^dag^2 - beta*^2)^n |0>.
struct CatLikeSpec {
  int n = 1;
  Complex beta;
  double normalization = 0.0;  // N = sum_k C(n,k)^2 (2k)! |beta|^{4(n-k)}
};

// The normalized cat-like state (even Fock amplitudes only, top index 2n)
// together with its spec. Requires 2n < cutoff.
std::pair<FockVector, CatLikeSpec> cat_like_state(const FockSpace& space,
                                                  int n, Complex beta);

// The normalization sum evaluated directly (log-space, exact for all n).
double cat_normalization_direct(int n, Complex beta);

// The same normalization through the generalized hypergeometric identity
//   N = 4^n n! / sqrt(pi) * Gamma(n + 1/2) * 1F2(-n; 1/2 - n, 1; |beta|^4/4)
// (terminating series). Independent route used to cross-check the direct sum.
double cat_normalization_hypergeometric(int n, Complex beta);

// Even coherent superposition with the phase the cat-like family converges
// to: e^{i |beta|^2 (pi - 2 arg beta)} 2^{-1/2} (|i beta> + |-i beta>).
// Carries the literal 1/sqrt(2) prefactor; the components are not orthogonal,
// so the squared norm is 1 + e^{-2|beta|^2}, not exactly 1.
FockVector cat_state(const FockSpace& space, Complex beta);

// Squared overlap of |Psi_n(beta)> with that literal superposition at
// |beta|^2 = n:  2 (4/e)^n / sum_k p_k f_k, with
// p_k f_k = C(n,k)^2 (2k)! / n^{2k}. Tends to 1 as n grows.
double cat_overlap_closed_form(int n);

// The same quantity evaluated numerically from the state vectors at
// |beta|^2 = n (beta real positive).
double cat_overlap_numeric(int n, const FockSpace& space);

// Design the two-stage, n-clicks-each scheme measuring overlaps with
// |Psi_n(beta)>: zeros +-beta each with multiplicity n. Uses a clustering
// tolerance wide enough for the eps^(1/n) root spread plus centroid
// refinement. Verifies the stage pattern and zero locations.
std::pair<Scheme, DesignReport> cat_scheme(int n, Complex beta,
                                           const BeamSplitter& bs);

// Closed-form efficiency of that scheme:
//   N |r^2 t|^{2n} / n!^2 * exp(-|r beta / t|^2 [1 + (1 - 2|t|^2)^2 / |t|^2]).
double cat_efficiency_closed_form(int n, Complex beta, const BeamSplitter& bs);

// Overlap of rho with the normalized superposition (|beta1> + |beta2>)/norm,
// measured by displacing rho by -gamma = -(beta1+beta2)/2 and running the
// cat pipeline at beta = (beta1 - beta2)/(2i), n = max(1, round(|beta|^2)).
// `pipeline` is the measured value; `direct` the exact overlap with the
// normalized superposition. They agree when the displaced superposition is a
// cat-like target up to global phase (Re(gamma conj(beta)) = 0 mod pi) and
// n matches |beta|^2; both are reported so the approximation error is visible.
struct DisplacedOverlapReport {
  double pipeline = 0.0;
  double direct = 0.0;
  int n_used = 1;
  Complex beta;
  Complex gamma;
  double efficiency = 0.0;
};
DisplacedOverlapReport displaced_superposition_overlap(const FockOperator& rho,
                                                       Complex beta1,
                                                       Complex beta2,
                                                       const BeamSplitter& bs);

}  // namespace qov
