#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qov/polyroots.hpp"

using namespace qov;

namespace {

bool multiset_close(std::vector<Complex> a, std::vector<Complex> b,
                    double tol) {
  if (a.size() != b.size()) return false;
  for (Complex x : a) {
    auto best = std::min_element(b.begin(), b.end(), [&](Complex u, Complex v) {
      return std::abs(u - x) < std::abs(v - x);
    });
    if (best == b.end() || std::abs(*best - x) > tol) return false;
    b.erase(best);
  }
  return true;
}

// Ascending-degree coefficients of prod_k (z - root_k), leading 1.
std::vector<Complex> expand_roots(const std::vector<Complex>& rs) {
  std::vector<Complex> c{Complex(1.0)};
  for (Complex r : rs) {
    std::vector<Complex> next(c.size() + 1, Complex(0.0));
    for (size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

}  // namespace

TEST_SUITE("polyroots") {

TEST_CASE("quadratic and linear roots") {
  std::vector<Complex> quad = roots(Polynomial({-1.0, 0.0, 1.0}));
  REQUIRE(quad.size() == 2);
  CHECK(multiset_close(quad, {Complex(1.0), Complex(-1.0)}, 1e-12));

  std::vector<Complex> lin = roots(Polynomial({1.0, 1.0}));
  REQUIRE(lin.size() == 1);
  CHECK(std::abs(lin[0] - Complex(-1.0)) < 1e-13);
}

TEST_CASE("output follows the canonical root order") {
  // (z - 2)(z + 1) = -2 - z + z^2: descending modulus puts 2 first.
  std::vector<Complex> rs = roots(Polynomial({-2.0, -1.0, 1.0}));
  REQUIRE(rs.size() == 2);
  CHECK(std::abs(rs[0] - Complex(2.0)) < 1e-12);
  CHECK(std::abs(rs[1] - Complex(-1.0)) < 1e-12);

  std::vector<Complex> mixed{Complex(0.0, -1.0), Complex(1.0),
                             Complex(0.0, 1.0), Complex(-2.0)};
  sort_roots_canonical(mixed);
  CHECK(mixed[0] == Complex(-2.0));       // modulus 2 first
  CHECK(mixed[1] == Complex(0.0, -1.0));  // then ascending phase: -pi/2
  CHECK(mixed[2] == Complex(1.0));        // 0
  CHECK(mixed[3] == Complex(0.0, 1.0));   // +pi/2
}

TEST_CASE("double roots are located to the square-root-of-eps scale") {
  // (z^2 - 1)^2 = 1 - 2 z^2 + z^4.
  std::vector<Complex> rs =
      roots(Polynomial({1.0, 0.0, -2.0, 0.0, 1.0}));
  REQUIRE(rs.size() == 4);
  CHECK(multiset_close(rs, {1.0, 1.0, -1.0, -1.0}, 1e-6));
  for (Complex r : rs) {
    double dist = std::min(std::abs(r - 1.0), std::abs(r + 1.0));
    CHECK(dist < 1e-6);  // ~1e-8 typical; sqrt(eps) is the hard limit
  }
}

TEST_CASE("clustering groups nearby roots and keeps the canonical order") {
  std::vector<RootCluster> clusters = cluster_roots(
      {Complex(1.0), Complex(1.0, 1e-9), Complex(-1.0)}, 1e-6);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].multiplicity == 2);
  CHECK(std::abs(clusters[0].value - Complex(1.0)) < 1e-9);
  CHECK(clusters[1].multiplicity == 1);
  CHECK(std::abs(clusters[1].value - Complex(-1.0)) == 0.0);
}

TEST_CASE("tiny tolerance keeps distinct roots separate") {
  std::vector<Complex> rs{Complex(0.5, 0.2), Complex(-1.2), Complex(0.0, 2.0)};
  std::vector<RootCluster> clusters = cluster_roots(rs, 1e-15);
  REQUIRE(clusters.size() == 3);
  for (const RootCluster& c : clusters) CHECK(c.multiplicity == 1);
  CHECK_THROWS_AS(cluster_roots(rs, 0.0), std::invalid_argument);
}

TEST_CASE("triple roots cluster to the right multiplicities") {
  // (z^2 - 1)^3 = -1 + 3 z^2 - 3 z^4 + z^6.
  std::vector<Complex> rs =
      roots(Polynomial({-1.0, 0.0, 3.0, 0.0, -3.0, 0.0, 1.0}));
  REQUIRE(rs.size() == 6);
  std::vector<RootCluster> clusters = cluster_roots(rs, 1e-3);
  REQUIRE(clusters.size() == 2);
  std::vector<Complex> values;
  for (const RootCluster& c : clusters) {
    CHECK(c.multiplicity == 3);
    values.push_back(c.value);
  }
  CHECK(multiset_close(values, {Complex(1.0), Complex(-1.0)}, 1e-4));
}

TEST_CASE("refinement recovers multiple roots to machine precision") {
  Polynomial p({1.0, 0.0, -2.0, 0.0, 1.0});  // (z^2-1)^2
  Complex refined = refine_multiple_root(p, Complex(1.0 + 3e-8, -2e-8), 2);
  CHECK(std::abs(refined - Complex(1.0)) < 1e-12);

  Polynomial cubic({-1.0, 0.0, 3.0, 0.0, -3.0, 0.0, 1.0});  // (z^2-1)^3
  Complex refined3 = refine_multiple_root(cubic, Complex(-1.0 + 2e-3, 1e-3), 3);
  CHECK(std::abs(refined3 - Complex(-1.0)) < 1e-12);
}

TEST_CASE("vanishing low coefficients deflate to exact zero roots") {
  std::vector<Complex> cubic = roots(Polynomial({0.0, 0.0, 0.0, 1.0}));
  REQUIRE(cubic.size() == 3);
  for (Complex r : cubic) CHECK(std::abs(r) == 0.0);

  // z^2 (z - 2): zeros at the origin stay exact, the simple root converges.
  std::vector<Complex> mixed = roots(Polynomial({0.0, 0.0, -2.0, 1.0}));
  REQUIRE(mixed.size() == 3);
  CHECK(std::abs(mixed[0] - Complex(2.0)) < 1e-12);
  CHECK(std::abs(mixed[1]) == 0.0);
  CHECK(std::abs(mixed[2]) == 0.0);
}

TEST_CASE("random polynomials reconstruct from their roots") {
  std::mt19937 gen(4251);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    int degree = 2 + int(gen() % 9);  // up to 10
    std::vector<Complex> true_roots;
    while (int(true_roots.size()) < degree) {
      Complex z(coord(gen), coord(gen));
      bool ok = true;
      for (Complex w : true_roots) ok = ok && std::abs(z - w) >= 0.35;
      if (ok) true_roots.push_back(z);
    }
    Complex leading(coord(gen), coord(gen));
    if (std::abs(leading) < 0.1) leading += 1.0;
    std::vector<Complex> coeffs = expand_roots(true_roots);
    for (Complex& c : coeffs) c *= leading;

    std::vector<Complex> found = roots(Polynomial(coeffs));
    CHECK(multiset_close(found, true_roots, 1e-8));

    std::vector<Complex> rebuilt = expand_roots(found);
    for (size_t k = 0; k < coeffs.size(); ++k) {
      Complex want = coeffs[k] / leading;
      CHECK(std::abs(rebuilt[k] - want) <=
            1e-8 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("root finding is deterministic") {
  std::vector<Complex> coeffs{Complex(0.3, -1.1), Complex(2.0, 0.4),
                              Complex(-0.7, 0.9), Complex(1.0, 0.0),
                              Complex(0.5, -0.5)};
  std::vector<Complex> first = roots(Polynomial(coeffs));
  std::vector<Complex> second = roots(Polynomial(coeffs));
  REQUIRE(first.size() == second.size());
  for (size_t i = 0; i < first.size(); ++i) CHECK(first[i] == second[i]);
}

TEST_CASE("residuals meet the advertised bound") {
  std::vector<Complex> coeffs{Complex(1.0, 0.5), Complex(-2.0, 1.0),
                              Complex(0.0, -1.5), Complex(1.0)};
  Polynomial p(coeffs);
  for (Complex r : roots(p)) CHECK(p.relative_residual(r) < 1e-10);

  CHECK_THROWS_AS(Polynomial({}), std::invalid_argument);
  CHECK_THROWS_AS(Polynomial({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(roots(Polynomial({1.0})), std::invalid_argument);
}

}  // TEST_SUITE
