#include "qov/oracle.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace qov {

namespace {

// 2x2 anti-hermitian generator G with exp(G) = [[t, r], [-r*, t*]].
// Writing the SU(2) element as u0 I + i u.sigma (u real), the log is
// (theta / sin theta) (M - u0 I) with theta = atan2(|u|, u0).
Eigen::Matrix2cd su2_generator(const BeamSplitter& bs) {
  Eigen::Matrix2cd m;
  m << bs.t, bs.r, -std::conj(bs.r), std::conj(bs.t);
  double u0 = std::clamp(bs.t.real(), -1.0, 1.0);
  double s = std::sqrt(std::max(0.0, 1.0 - u0 * u0));
  if (s < 1e-300) {
    if (u0 < 0.0) {
      // exp(G) = -I has no unique small generator; not a usable splitter.
      throw std::invalid_argument("beam splitter at the -identity singularity");
    }
    return Eigen::Matrix2cd::Zero();
  }
  double theta = std::atan2(s, u0);
  return (theta / s) * (m - u0 * Eigen::Matrix2cd::Identity());
}

int auto_ancilla_cutoff(const FockSpace& signal, Complex alpha) {
  // Room for the coherent ancilla itself plus every photon the signal could
  // hand over (total photon number is conserved).
  return signal.cutoff + cutoff_for_amplitude(std::abs(alpha));
}

}  // namespace

TwoModeSpace::TwoModeSpace(int ca, int cb) : cutoff_a(ca), cutoff_b(cb) {
  if (ca < 1 || cb < 1) {
    throw std::invalid_argument("two-mode cutoffs must be >= 1");
  }
}

CMat beam_splitter_unitary(const TwoModeSpace& space, const BeamSplitter& bs) {
  Eigen::Matrix2cd g = su2_generator(bs);
  const int ca = space.cutoff_a, cb = space.cutoff_b;
  CMat u = CMat::Zero(space.dim(), space.dim());

  // The generator conserves n_a + n_b, so exponentiate block by block over
  // the total photon number. Blocks entirely below both cutoffs are exactly
  // unitary; higher blocks are truncated (their loss shows up only through
  // amplitudes that were already beyond the cutoffs).
  for (int total = 0; total <= ca + cb - 2; ++total) {
    int na_min = std::max(0, total - (cb - 1));
    int na_max = std::min(total, ca - 1);
    int size = na_max - na_min + 1;
    if (size < 1) continue;
    CMat k = CMat::Zero(size, size);
    for (int i = 0; i < size; ++i) {
      int na = na_min + i;
      int nb = total - na;
      k(i, i) = g(0, 0) * double(na) + g(1, 1) * double(nb);
      if (i + 1 < size) {
        // a^dag b connects (na, nb) -> (na+1, nb-1).
        k(i + 1, i) = g(0, 1) * std::sqrt(double(na + 1) * double(nb));
        // b^dag a connects (na+1, nb-1) -> (na, nb).
        k(i, i + 1) = g(1, 0) * std::sqrt(double(na + 1) * double(nb));
      }
    }
    CMat block = k.exp();
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) {
        int row = space.index(na_min + i, total - na_min - i);
        int col = space.index(na_min + j, total - na_min - j);
        u(row, col) = block(i, j);
      }
    }
  }
  return u;
}

std::vector<FockOperator> conditional_stage_family(const FockSpace& signal,
                                                   const BeamSplitter& bs,
                                                   Complex alpha,
                                                   int ancilla_cutoff) {
  int cb = ancilla_cutoff > 0 ? ancilla_cutoff
                              : auto_ancilla_cutoff(signal, alpha);
  TwoModeSpace two(signal.cutoff, cb);
  CMat u = beam_splitter_unitary(two, bs);
  FockVector anc = coherent_state(FockSpace(cb), alpha);

  std::vector<FockOperator> family(
      cb, FockOperator(signal, CMat::Zero(signal.cutoff, signal.cutoff)));
  CVec in = CVec::Zero(two.dim());
  for (int n = 0; n < signal.cutoff; ++n) {
    in.setZero();
    in.segment(two.index(n, 0), cb) = anc.amp;
    CVec out = u * in;
    for (int m = 0; m < cb; ++m) {
      for (int row = 0; row < signal.cutoff; ++row) {
        family[m].matrix(row, n) = out[two.index(row, m)];
      }
    }
  }
  return family;
}

FockOperator conditional_stage_oracle(const FockSpace& signal,
                                      const BeamSplitter& bs, Complex alpha,
                                      int clicks, int ancilla_cutoff) {
  if (clicks < 0) throw std::invalid_argument("negative click count");
  int cb = ancilla_cutoff > 0 ? ancilla_cutoff
                              : auto_ancilla_cutoff(signal, alpha);
  if (clicks >= cb) {
    throw std::invalid_argument("click count " + std::to_string(clicks) +
                                " outside ancilla cutoff " + std::to_string(cb));
  }
  return conditional_stage_family(signal, bs, alpha, cb)[clicks];
}

double cascade_probability_oracle(const FockOperator& rho_in,
                                  const Scheme& scheme) {
  CMat rho = rho_in.matrix;
  for (const Stage& st : scheme.stages) {
    FockOperator a =
        conditional_stage_oracle(rho_in.space, scheme.bs, st.alpha, st.clicks);
    rho = a.matrix * rho * a.matrix.adjoint();
  }
  // The unnormalized conditional state's vacuum element is the joint
  // probability of all stage clicks plus the dark final detector.
  return std::max(rho(0, 0).real(), 0.0);
}

}  // namespace qov
