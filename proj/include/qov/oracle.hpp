#pragma once

#include <vector>

#include "qov/fock.hpp"
#include "qov/scheme.hpp"

namespace qov {

// Two truncated modes, signal (a) and ancilla (b), flattened row-major:
// |n_a, n_b> sits at index n_a * cutoff_b + n_b.
struct TwoModeSpace {
  int cutoff_a;
  int cutoff_b;

  TwoModeSpace(int ca, int cb);
  int dim() const { return cutoff_a * cutoff_b; }
  int index(int na, int nb) const { return na * cutoff_b + nb; }
};

// Beam-splitter unitary U = exp(K), K = sum_jk G_jk a_j^dag a_k, where
// exp(G) = [[t, r], [-r*, t*]] in SU(2). Port convention:
// U^dag a U = t a + r b, U^dag b U = -r* a + t* b, so a single photon maps
// |1,0> -> t |1,0> - r* |0,1>. K conserves total photon number, so U is built
// block-per-total-n and every block that fits under both cutoffs is exactly
// unitary.
CMat beam_splitter_unitary(const TwoModeSpace& space, const BeamSplitter& bs);

// Independent route to the conditional stage map: prepare |n>_a |alpha>_b,
// apply the two-mode unitary, project the ancilla onto |clicks>. Column n of
// the result is that amplitude vector. ancilla_cutoff = 0 auto-sizes the
// ancilla to hold |alpha| plus anything the signal can spill into it.
FockOperator conditional_stage_oracle(const FockSpace& signal,
                                      const BeamSplitter& bs, Complex alpha,
                                      int clicks, int ancilla_cutoff = 0);

// All ancilla outcomes of one stage at once: element m is the conditional map
// for the ancilla detector firing m times. One two-mode evolution per signal
// basis state serves every m.
std::vector<FockOperator> conditional_stage_family(const FockSpace& signal,
                                                   const BeamSplitter& bs,
                                                   Complex alpha,
                                                   int ancilla_cutoff = 0);

// Joint event probability computed entirely through the two-mode route:
// feed rho through each stage's oracle map and read the vacuum element.
// Cross-checks joint_event_probability without sharing its algebra.
double cascade_probability_oracle(const FockOperator& rho_in,
                                  const Scheme& scheme);

}  // namespace qov
