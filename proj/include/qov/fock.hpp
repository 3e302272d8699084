#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qov/errors.hpp"

namespace qov {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Truncated single-mode Fock space: photon numbers 0 .. cutoff-1.
struct FockSpace {
  int cutoff;

  explicit FockSpace(int cutoff_);
  int dim() const { return cutoff; }
  friend bool operator==(const FockSpace& a, const FockSpace& b) = default;
};

// Complex amplitude vector over a FockSpace. Immutable by convention after
// construction; operations return new values.
struct FockVector {
  FockSpace space;
  CVec amp;

  FockVector(const FockSpace& s, CVec a);
  double norm() const { return amp.norm(); }
  double squared_norm() const { return amp.squaredNorm(); }
  FockVector normalized() const;
  // Largest n with |amp[n]| > rel_tol * max|amp|; -1 for the zero vector.
  int top_index(double rel_tol = 1e-12) const;
};

// Dense complex matrix over a FockSpace.
struct FockOperator {
  FockSpace space;
  CMat matrix;

  FockOperator(const FockSpace& s, CMat m);
  FockOperator adjoint() const { return {space, matrix.adjoint()}; }
  FockOperator operator*(const FockOperator& rhs) const;
  FockVector operator*(const FockVector& v) const;
  static FockOperator identity(const FockSpace& s);
};

FockOperator operator*(Complex c, const FockOperator& op);
FockVector operator*(Complex c, const FockVector& v);

// Ladder operators on the truncated space: annihilate |n> = sqrt(n) |n-1>,
// create = annihilate^dagger (create |cutoff-1> truncates to 0), number = diag(n).
struct LadderOperators {
  FockOperator annihilate;
  FockOperator create;
  FockOperator number;
};
LadderOperators ladder_operators(const FockSpace& space);
FockOperator annihilation_operator(const FockSpace& space);
FockOperator creation_operator(const FockSpace& space);
FockOperator number_operator(const FockSpace& space);

// Poisson tail mass sum_{n >= cutoff} e^{-m} m^n / n! for mean m = |alpha|^2:
// the weight a coherent state |alpha> carries at or above the cutoff.
double coherent_tail_mass(double mean_photons, int cutoff);

// Smallest cutoff whose coherent tail mass for |alpha| is below tail_tol.
int cutoff_for_amplitude(double abs_alpha, double tail_tol = 1e-12,
                         int min_cutoff = 1);

// exp(alpha a^dag - conj(alpha) a), built by scaling-and-squaring in a
// double-size workspace and cropped, so truncation artifacts stay below the
// coherent-tail tolerance. Requires coherent_tail_mass(|alpha|^2, cutoff) < 1e-12.
FockOperator displacement_operator(const FockSpace& space, Complex alpha);

// t^{a^dag a}: diagonal attenuation. Requires |t| <= 1 + 1e-12.
FockOperator attenuation_operator(const FockSpace& space, Complex t);

// Normalized coherent state amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
// Same tail precondition as displacement_operator.
FockVector coherent_state(const FockSpace& space, Complex alpha);

// |n>.
FockVector fock_basis_state(const FockSpace& space, int n);

// Normalized product state prod_k (a^dag - conj(zero_k)) |0>. The zeros are
// the roots of the state's characteristic polynomial (see zero_polynomial).
FockVector state_from_zeros(const FockSpace& space,
                            const std::vector<Complex>& zeros);

// Coefficients c_n = conj(amp_n) / sqrt(n!), n = 0..top_index: the numerator
// polynomial of the state's Q function, whose roots determine the state up to
// normalization. Throws ZeroState / VacuumOnly.
std::vector<Complex> zero_polynomial_coefficients(const FockVector& psi);

// All top_index roots of the polynomial above, in the canonical deterministic
// order (descending modulus, then ascending phase).
std::vector<Complex> zeros_of_state(const FockVector& psi);

// |<u|v>|^2 / (|u|^2 |v|^2): squared overlap ignoring normalization and any
// global phase. Throws ZeroState / SpaceMismatch.
double fidelity_up_to_phase(const FockVector& u, const FockVector& v);

Complex inner_product(const FockVector& u, const FockVector& v);

// Zero-padded copy in a larger space.
FockVector embed(const FockVector& v, const FockSpace& larger);
FockOperator embed(const FockOperator& op, const FockSpace& larger);

}  // namespace qov
