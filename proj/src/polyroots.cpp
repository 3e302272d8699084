#include "qov/polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qov {

namespace {

constexpr int kMaxPasses = 500;
constexpr double kStepTol = 1e-14;
constexpr double kResidualTol = 1e-10;

// p(z) and p'(z) in one Horner pass.
std::pair<Complex, Complex> eval_with_derivative(
    const std::vector<Complex>& coeffs, Complex z) {
  Complex p = 0.0, dp = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    dp = dp * z + p;
    p = p * z + coeffs[k];
  }
  return {p, dp};
}

}  // namespace

Polynomial::Polynomial(std::vector<Complex> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) throw std::invalid_argument("empty polynomial");
  if (std::abs(coeffs.back()) == 0.0) {
    throw std::invalid_argument("polynomial leading coefficient is zero");
  }
}

Complex Polynomial::eval(Complex z) const {
  Complex p = 0.0;
  for (int k = degree(); k >= 0; --k) p = p * z + coeffs[k];
  return p;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) {
    return Polynomial({Complex(0.0)});  // caller beware: represented as zero constant
  }
  std::vector<Complex> d(coeffs.size() - 1);
  for (size_t k = 1; k < coeffs.size(); ++k) d[k - 1] = double(k) * coeffs[k];
  return Polynomial(std::move(d));
}

double Polynomial::residual_scale(Complex z) const {
  double base = std::max(1.0, std::abs(z));
  double scale = 0.0, pw = 1.0;
  for (const Complex& c : coeffs) {
    scale += std::abs(c) * pw;
    pw *= base;
  }
  return scale;
}

double Polynomial::relative_residual(Complex z) const {
  return std::abs(eval(z)) / residual_scale(z);
}

void sort_roots_canonical(std::vector<Complex>& rs) {
  std::sort(rs.begin(), rs.end(), [](Complex a, Complex b) {
    double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    double pa = std::arg(a), pb = std::arg(b);
    if (pa != pb) return pa < pb;
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<Complex> roots(const Polynomial& p) {
  if (p.degree() < 1) {
    throw std::invalid_argument("root finding needs degree >= 1");
  }

  // Exactly-zero low-order coefficients are roots at the origin; deflate them
  // so the iteration only sees simple structure there.
  size_t origin = 0;
  while (origin < p.coeffs.size() - 1 &&
         std::abs(p.coeffs[origin]) == 0.0) {
    ++origin;
  }
  std::vector<Complex> work(p.coeffs.begin() + origin, p.coeffs.end());
  std::vector<Complex> out(origin, Complex(0.0));

  int n = static_cast<int>(work.size()) - 1;
  if (n > 0) {
    // Deterministic start: Cauchy-bound circle, evenly spread with a fixed
    // angular offset so no guess sits on a symmetry axis.
    double bound = 0.0;
    for (int k = 0; k < n; ++k) {
      bound = std::max(bound, std::abs(work[k]) / std::abs(work[n]));
    }
    double radius = 1.0 + bound;
    std::vector<Complex> z(n);
    for (int i = 0; i < n; ++i) {
      double angle = 2.0 * M_PI * (i + 0.5) / n + 0.25;
      z[i] = radius * Complex(std::cos(angle), std::sin(angle));
    }

    std::vector<Complex> step(n);
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      double worst = 0.0;
      for (int i = 0; i < n; ++i) {
        auto [pv, dv] = eval_with_derivative(work, z[i]);
        if (pv == Complex(0.0)) {
          step[i] = 0.0;
          continue;
        }
        if (dv == Complex(0.0)) {
          // Sitting on a critical point: nudge off it and retry next pass.
          step[i] = Complex(1e-8 * (1.0 + std::abs(z[i])), 0.0);
          continue;
        }
        Complex newton = pv / dv;
        Complex repulse = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          Complex diff = z[i] - z[j];
          if (diff == Complex(0.0)) diff = Complex(1e-12, 1e-12);
          repulse += 1.0 / diff;
        }
        Complex denom = 1.0 - newton * repulse;
        step[i] = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      }
      for (int i = 0; i < n; ++i) {
        z[i] -= step[i];
        worst = std::max(worst, std::abs(step[i]) / (1.0 + std::abs(z[i])));
      }
      if (worst < kStepTol) break;
      // Multiple roots never meet the step criterion (they stall at
      // ~eps^(1/m)); the pass cap ends those, and the residual check below
      // decides whether the result is acceptable.
    }

    Polynomial deflated(work);
    double worst_residual = 0.0;
    for (Complex r : z) {
      worst_residual = std::max(worst_residual, deflated.relative_residual(r));
    }
    if (worst_residual >= kResidualTol) {
      throw NoConvergence("root iteration cap reached with residual " +
                              std::to_string(worst_residual),
                          worst_residual);
    }
    out.insert(out.end(), z.begin(), z.end());
  }

  sort_roots_canonical(out);
  return out;
}

std::vector<RootCluster> cluster_roots(const std::vector<Complex>& rs,
                                       double tol) {
  if (tol <= 0.0) throw std::invalid_argument("cluster tolerance must be > 0");
  std::vector<Complex> sorted = rs;
  sort_roots_canonical(sorted);

  std::vector<RootCluster> clusters;
  for (Complex r : sorted) {
    bool placed = false;
    for (RootCluster& c : clusters) {
      if (std::abs(r - c.value) <= tol * (1.0 + std::abs(r))) {
        // Running centroid.
        c.value = (c.value * double(c.multiplicity) + r) /
                  double(c.multiplicity + 1);
        c.multiplicity += 1;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({r, 1});
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const RootCluster& a, const RootCluster& b) {
              double ma = std::abs(a.value), mb = std::abs(b.value);
              if (ma != mb) return ma > mb;
              double pa = std::arg(a.value), pb = std::arg(b.value);
              if (pa != pb) return pa < pb;
              return a.value.real() < b.value.real();
            });
  return clusters;
}

Complex refine_multiple_root(const Polynomial& p, Complex approx,
                             int multiplicity) {
  if (multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1");
  Polynomial q = p;
  for (int k = 1; k < multiplicity; ++k) q = q.derivative();
  // The m-fold root of p is a simple root of the (m-1)-th derivative; plain
  // Newton converges quadratically from the cluster centroid.
  Complex z = approx;
  for (int pass = 0; pass < 60; ++pass) {
    auto [pv, dv] = eval_with_derivative(q.coeffs, z);
    if (pv == Complex(0.0) || dv == Complex(0.0)) break;
    Complex step = pv / dv;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace qov
