#pragma once

#include <utility>
#include <vector>

#include "qov/fock.hpp"
#include "qov/polyroots.hpp"

namespace qov {

// Beam splitter with transmittance t and reflectance r, |t|^2 + |r|^2 = 1.
// Construction only checks normalization; operations that divide by t or r
// (stage operators, design maps) additionally require both to be nonzero.
struct BeamSplitter {
  Complex t;
  Complex r;

  BeamSplitter(Complex t_, Complex r_);
  // Real pair (sqrt(tsq), sqrt(1-tsq)) for tsq in (0,1).
  static BeamSplitter from_transmittance(double tsq);
  double tsq() const { return std::norm(t); }
  double rsq() const { return std::norm(r); }
};

// One conditional measurement step: mix the signal with coherent |alpha> and
// demand the stage detector register exactly `clicks` photons.
struct Stage {
  Complex alpha;
  int clicks = 1;
};

// The full cascade. After the last stage the remaining signal mode meets a
// final detector that must register zero photons (always on in this model).
struct Scheme {
  BeamSplitter bs;
  std::vector<Stage> stages;
  bool final_zero = true;

  int total_clicks() const;
};

struct DesignOptions {
  double cluster_tol = 1e-6;       // relative root-clustering tolerance
  double min_fidelity = 1.0 - 1e-6;  // post-design self-check threshold
  double tail_tol = 1e-13;         // coherent-tail rule for the verify cutoff
  int cutoff_margin = 8;
};

// What design_scheme found: the zeros (with multiplicities), the per-stage
// amplitudes, both efficiency routes and the worst root residual.
struct DesignReport {
  FockVector target;
  std::vector<RootCluster> zeros;
  std::vector<Complex> alphas;     // one per emitted stage, in stage order
  double efficiency_closed = 0.0;
  double efficiency_numeric = 0.0;
  double root_residual = 0.0;
  int verify_cutoff = 0;
};

// Conditional stage operator
//   Y = D(alpha/r*) t^{n} [(-r* a)^clicks / sqrt(clicks!)] D(-(t*/r*) alpha):
// the non-unitary map the signal suffers when the stage detector fires
// `clicks` times.
FockOperator stage_operator(const FockSpace& space, const BeamSplitter& bs,
                            const Stage& stage);

// Product of all stage operators, first stage applied first (rightmost).
FockOperator cascade_operator(const FockSpace& space, const Scheme& scheme);

// v = Y^dag |0>: the vector the scheme projects onto (conjugated top row of
// the cascade). ||v||^2 is the efficiency; <v|rho|v> the joint probability.
FockVector cascade_projection(const FockSpace& space, const Scheme& scheme);

// Per-stage coherent amplitudes from the per-stage zeros and back. Exact
// inverses of each other. The k-th amplitude is
//   alpha_k = r*/(t (t*)^{k+1}) sum_{l<=k} |t|^{2l} (beta_l - beta_{l-1}),
// and the inverse
//   beta_k = (t/r*) sum_{l<=k} (t* alpha_l - alpha_{l-1}) / t^l.
std::vector<Complex> alphas_from_zeros(const std::vector<Complex>& zeros,
                                       const BeamSplitter& bs);
std::vector<Complex> zeros_from_alphas(const std::vector<Complex>& alphas,
                                       const BeamSplitter& bs);

// Design the measurement scheme that projects onto `target`: find the zeros
// of the target's polynomial, optionally cluster degenerate ones into
// multi-click stages (multiplicity-m cluster centroids are Newton-refined),
// map the per-stage zeros to coherent amplitudes, and verify the resulting
// cascade against the target at a self-chosen cutoff. Throws
// DesignVerificationFailed if the verification fidelity or the closed/numeric
// efficiency agreement fails.
std::pair<Scheme, DesignReport> design_scheme(const FockVector& target,
                                              const BeamSplitter& bs,
                                              bool merge_degenerate,
                                              const DesignOptions& opts = {});

// Checks rho is hermitian, unit-trace and positive within tol; NotAState
// otherwise.
void validate_density_operator(const FockOperator& rho, double tol = 1e-9);

// <0| Y rho Y^dag |0>: probability that every stage detector fires its click
// count and the final detector stays dark. rho must be a density operator
// (hermitian, unit trace, positive) within 1e-9; NotAState otherwise.
double joint_event_probability(const FockOperator& rho_in,
                               const Scheme& scheme);

// ||Y^dag |0>||^2 computed from the cascade matrices.
double efficiency_numeric(const FockSpace& space, const Scheme& scheme);

// Closed-form efficiency for an all-single-click design:
//   N! / |<N|target>|^2 * |r|^{2N} |t|^{N(N-1)} e^{-sum |alpha_k|^2}.
// target must be normalized with top index N = alphas.size().
double efficiency_closed_form(const FockVector& target, const BeamSplitter& bs,
                              const std::vector<Complex>& alphas);

// Closed-form efficiency for an arbitrary click pattern (reduces to the
// formula above when every stage has one click):
//   N! / |<N|target>|^2 * prod_i (|r|^{2 d_i} / d_i!)
//     * |t|^{2 sum_i (i-1) d_i} * e^{-sum_i |alpha_i|^2}.
double scheme_efficiency_closed_form(const FockVector& target,
                                     const Scheme& scheme);

// Overlap <target|rho|target> recovered from a measured joint probability:
// p / efficiency, clamped to [0,1]. Throws InconsistentProbability if p
// exceeds the efficiency by more than a 1e-9 relative slack.
double overlap_from_probability(double p, double efficiency);

// Direct closed-form evaluation of Y^dag |0> as a scaled product of shifted
// creation operators over the stage zeros (global phase unspecified):
// independent of the cascade matrix route, used to cross-check it.
FockVector product_form_projection(const FockSpace& space,
                                   const BeamSplitter& bs,
                                   const std::vector<Complex>& alphas);

// Cutoff large enough for every displacement argument in the scheme plus the
// target's top index, under the coherent-tail rule, plus a safety margin.
int working_cutoff(const Scheme& scheme, int top_index,
                   double tail_tol = 1e-12, int margin = 8);

}  // namespace qov
