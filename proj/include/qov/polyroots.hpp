#pragma once

#include <vector>

#include "qov/fock.hpp"

namespace qov {

// Complex polynomial, coefficients in ascending degree, leading nonzero.
struct Polynomial {
  std::vector<Complex> coeffs;

  explicit Polynomial(std::vector<Complex> c);
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Complex eval(Complex z) const;
  Polynomial derivative() const;
  // Scale for relative residuals: sum_k |c_k| max(1,|z|)^k.
  double residual_scale(Complex z) const;
  double relative_residual(Complex z) const;
};

// A group of nearby roots treated as one root with a multiplicity.
struct RootCluster {
  Complex value;
  int multiplicity = 1;
};

// Deterministic ordering used for all root output: descending |z|, then
// ascending phase in (-pi, pi], then lexicographic (re, im) as a tiebreak.
void sort_roots_canonical(std::vector<Complex>& rs);

// All roots of p by simultaneous Aberth-Ehrlich iteration, started
// deterministically on the Cauchy-bound circle. Exact zero roots (vanishing
// low-order coefficients) are deflated first. Each returned root r satisfies
// |p(r)| / residual_scale(r) < 1e-10; an m-fold root is located only to
// roughly eps^(1/m) (refine_multiple_root recovers full precision).
// Throws NoConvergence if the residual bound cannot be met within 500 passes.
std::vector<Complex> roots(const Polynomial& p);

// Greedy clustering of nearby roots: a root joins the first cluster whose
// centroid is within tol * (1 + |root|); multiplicities sum to the input
// size. Output in the canonical order above (by centroid).
std::vector<RootCluster> cluster_roots(const std::vector<Complex>& rs,
                                       double tol);

// Newton refinement of an m-fold root of p via the (m-1)-th derivative, where
// the root is simple. Returns the refined location.
Complex refine_multiple_root(const Polynomial& p, Complex approx,
                             int multiplicity);

}  // namespace qov
