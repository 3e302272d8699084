#include "qov/fock.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "qov/polyroots.hpp"

namespace qov {

namespace {

constexpr double kTailTol = 1e-12;

void check_same_space(const FockSpace& a, const FockSpace& b,
                      const char* what) {
  if (!(a == b)) {
    throw SpaceMismatch(std::string(what) + ": cutoffs " +
                        std::to_string(a.cutoff) + " vs " +
                        std::to_string(b.cutoff));
  }
}

}  // namespace

FockSpace::FockSpace(int cutoff_) : cutoff(cutoff_) {
  if (cutoff < 1) {
    throw std::invalid_argument("FockSpace cutoff must be >= 1, got " +
                                std::to_string(cutoff));
  }
}

FockVector::FockVector(const FockSpace& s, CVec a)
    : space(s), amp(std::move(a)) {
  if (amp.size() != space.cutoff) {
    throw std::invalid_argument("FockVector: amplitude length " +
                                std::to_string(amp.size()) +
                                " does not match cutoff " +
                                std::to_string(space.cutoff));
  }
}

FockVector FockVector::normalized() const {
  double n = norm();
  if (n == 0.0) throw ZeroState("cannot normalize the zero vector");
  return {space, amp / n};
}

int FockVector::top_index(double rel_tol) const {
  double peak = amp.cwiseAbs().maxCoeff();
  if (peak == 0.0) return -1;
  for (int n = space.cutoff - 1; n >= 0; --n) {
    if (std::abs(amp[n]) > rel_tol * peak) return n;
  }
  return -1;
}

FockOperator::FockOperator(const FockSpace& s, CMat m)
    : space(s), matrix(std::move(m)) {
  if (matrix.rows() != space.cutoff || matrix.cols() != space.cutoff) {
    throw std::invalid_argument("FockOperator: matrix shape does not match cutoff");
  }
}

FockOperator FockOperator::operator*(const FockOperator& rhs) const {
  check_same_space(space, rhs.space, "operator product");
  return {space, matrix * rhs.matrix};
}

FockVector FockOperator::operator*(const FockVector& v) const {
  check_same_space(space, v.space, "operator application");
  return {space, matrix * v.amp};
}

FockOperator FockOperator::identity(const FockSpace& s) {
  return {s, CMat::Identity(s.cutoff, s.cutoff)};
}

FockOperator operator*(Complex c, const FockOperator& op) {
  return {op.space, c * op.matrix};
}

FockVector operator*(Complex c, const FockVector& v) {
  return {v.space, c * v.amp};
}

FockOperator annihilation_operator(const FockSpace& space) {
  CMat m = CMat::Zero(space.cutoff, space.cutoff);
  for (int n = 1; n < space.cutoff; ++n) m(n - 1, n) = std::sqrt(double(n));
  return {space, std::move(m)};
}

FockOperator creation_operator(const FockSpace& space) {
  CMat m = CMat::Zero(space.cutoff, space.cutoff);
  for (int n = 1; n < space.cutoff; ++n) m(n, n - 1) = std::sqrt(double(n));
  return {space, std::move(m)};
}

FockOperator number_operator(const FockSpace& space) {
  CMat m = CMat::Zero(space.cutoff, space.cutoff);
  for (int n = 0; n < space.cutoff; ++n) m(n, n) = double(n);
  return {space, std::move(m)};
}

LadderOperators ladder_operators(const FockSpace& space) {
  return {annihilation_operator(space), creation_operator(space),
          number_operator(space)};
}

double coherent_tail_mass(double mean_photons, int cutoff) {
  if (mean_photons < 0.0) throw std::invalid_argument("negative mean photon number");
  if (mean_photons == 0.0) return 0.0;
  // Poisson P(X >= cutoff) = regularized lower incomplete gamma P(cutoff, mean).
  return boost::math::gamma_p(double(cutoff), mean_photons);
}

int cutoff_for_amplitude(double abs_alpha, double tail_tol, int min_cutoff) {
  double mean = abs_alpha * abs_alpha;
  int c = std::max(1, min_cutoff);
  constexpr int kHardCap = 1 << 15;
  while (coherent_tail_mass(mean, c) >= tail_tol) {
    if (++c > kHardCap) {
      throw AmplitudeTooLargeForCutoff(
          "no practical cutoff holds amplitude |alpha| = " +
          std::to_string(abs_alpha));
    }
  }
  return c;
}

FockOperator displacement_operator(const FockSpace& space, Complex alpha) {
  if (coherent_tail_mass(std::norm(alpha), space.cutoff) >= kTailTol) {
    throw AmplitudeTooLargeForCutoff(
        "displacement amplitude |alpha| = " + std::to_string(std::abs(alpha)) +
        " does not fit below cutoff " + std::to_string(space.cutoff));
  }
  int w = 2 * space.cutoff;
  CMat g = CMat::Zero(w, w);
  for (int n = 1; n < w; ++n) {
    double s = std::sqrt(double(n));
    g(n, n - 1) = alpha * s;               // alpha a^dag
    g(n - 1, n) = -std::conj(alpha) * s;   // -conj(alpha) a
  }
  CMat d = g.exp();
  return {space, d.topLeftCorner(space.cutoff, space.cutoff)};
}

FockOperator attenuation_operator(const FockSpace& space, Complex t) {
  if (std::abs(t) > 1.0 + 1e-12) {
    throw std::invalid_argument("attenuation requires |t| <= 1, got |t| = " +
                                std::to_string(std::abs(t)));
  }
  CMat m = CMat::Zero(space.cutoff, space.cutoff);
  Complex p = 1.0;
  for (int n = 0; n < space.cutoff; ++n) {
    m(n, n) = p;
    p *= t;
  }
  return {space, std::move(m)};
}

FockVector coherent_state(const FockSpace& space, Complex alpha) {
  if (coherent_tail_mass(std::norm(alpha), space.cutoff) >= kTailTol) {
    throw AmplitudeTooLargeForCutoff(
        "coherent amplitude |alpha| = " + std::to_string(std::abs(alpha)) +
        " does not fit below cutoff " + std::to_string(space.cutoff));
  }
  CVec v(space.cutoff);
  v[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < space.cutoff; ++n) {
    v[n] = v[n - 1] * alpha / std::sqrt(double(n));
  }
  return {space, std::move(v)};
}

FockVector fock_basis_state(const FockSpace& space, int n) {
  if (n < 0 || n >= space.cutoff) {
    throw std::invalid_argument("Fock index " + std::to_string(n) +
                                " outside cutoff " + std::to_string(space.cutoff));
  }
  CVec v = CVec::Zero(space.cutoff);
  v[n] = 1.0;
  return {space, std::move(v)};
}

FockVector state_from_zeros(const FockSpace& space,
                            const std::vector<Complex>& zeros) {
  int n_zeros = static_cast<int>(zeros.size());
  if (n_zeros >= space.cutoff) {
    throw TooManyZerosForCutoff(std::to_string(n_zeros) +
                                " zeros need cutoff > " +
                                std::to_string(n_zeros));
  }
  CVec v = CVec::Zero(space.cutoff);
  v[0] = 1.0;
  // v <- (a^dag - conj(zero)) v, degree grows by one per step.
  for (int k = 0; k < n_zeros; ++k) {
    CVec next = CVec::Zero(space.cutoff);
    for (int n = 0; n <= k; ++n) {
      next[n + 1] += std::sqrt(double(n + 1)) * v[n];
      next[n] -= std::conj(zeros[k]) * v[n];
    }
    v = next;
  }
  return FockVector(space, std::move(v)).normalized();
}

std::vector<Complex> zero_polynomial_coefficients(const FockVector& psi) {
  int top = psi.top_index();
  if (top < 0) throw ZeroState("zero state has no characteristic polynomial");
  if (top == 0) throw VacuumOnly("state is vacuum-only: no zeros");
  std::vector<Complex> coeffs(top + 1);
  double log_fact = 0.0;
  for (int n = 0; n <= top; ++n) {
    if (n > 0) log_fact += std::log(double(n));
    coeffs[n] = std::conj(psi.amp[n]) * std::exp(-0.5 * log_fact);
  }
  return coeffs;
}

std::vector<Complex> zeros_of_state(const FockVector& psi) {
  return roots(Polynomial(zero_polynomial_coefficients(psi)));
}

Complex inner_product(const FockVector& u, const FockVector& v) {
  check_same_space(u.space, v.space, "inner product");
  return u.amp.dot(v.amp);  // Eigen's dot conjugates the left argument
}

double fidelity_up_to_phase(const FockVector& u, const FockVector& v) {
  double nu = u.squared_norm();
  double nv = v.squared_norm();
  if (nu == 0.0 || nv == 0.0) throw ZeroState("fidelity with a zero vector");
  return std::norm(inner_product(u, v)) / (nu * nv);
}

FockVector embed(const FockVector& v, const FockSpace& larger) {
  if (larger.cutoff < v.space.cutoff) {
    throw std::invalid_argument("embed target cutoff smaller than source");
  }
  CVec a = CVec::Zero(larger.cutoff);
  a.head(v.space.cutoff) = v.amp;
  return {larger, std::move(a)};
}

FockOperator embed(const FockOperator& op, const FockSpace& larger) {
  if (larger.cutoff < op.space.cutoff) {
    throw std::invalid_argument("embed target cutoff smaller than source");
  }
  CMat m = CMat::Zero(larger.cutoff, larger.cutoff);
  m.topLeftCorner(op.space.cutoff, op.space.cutoff) = op.matrix;
  return {larger, std::move(m)};
}

}  // namespace qov
