#include "qov/cat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qov {

namespace {

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

double log_binomial(int n, int k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

void check_order(int n) {
  if (n < 1) throw std::invalid_argument("cat-like order must be >= 1");
}

}  // namespace

std::pair<FockVector, CatLikeSpec> cat_like_state(const FockSpace& space,
                                                  int n, Complex beta) {
  check_order(n);
  if (2 * n >= space.cutoff) {
    throw std::invalid_argument("cat-like state of order " + std::to_string(n) +
                                " needs cutoff > " + std::to_string(2 * n));
  }
  double norm_sum = cat_normalization_direct(n, beta);
  Complex bc2 = std::conj(beta) * std::conj(beta);
  CVec v = CVec::Zero(space.cutoff);
  for (int k = 0; k <= n; ++k) {
    double mag = std::exp(log_binomial(n, k) + 0.5 * log_factorial(2 * k) -
                          0.5 * std::log(norm_sum));
    // Branch on the exponent first: complex pow(0, 0) is nan, not 1.
    Complex tail = k == n ? Complex(1.0)
                   : std::abs(beta) == 0.0
                       ? Complex(0.0)
                       : std::pow(-bc2, double(n - k));
    v[2 * k] = mag * tail;
  }
  return {FockVector{space, std::move(v)}, CatLikeSpec{n, beta, norm_sum}};
}

double cat_normalization_direct(int n, Complex beta) {
  check_order(n);
  double b4 = std::norm(beta) * std::norm(beta);
  if (b4 == 0.0) return std::exp(log_factorial(2 * n));
  double log_b4 = std::log(b4);
  // log-sum-exp over k of C(n,k)^2 (2k)! |beta|^{4(n-k)}
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(n + 1);
  for (int k = 0; k <= n; ++k) {
    logs[k] = 2.0 * log_binomial(n, k) + log_factorial(2 * k) +
              double(n - k) * log_b4;
    max_log = std::max(max_log, logs[k]);
  }
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - max_log);
  return std::exp(max_log) * sum;
}

double cat_normalization_hypergeometric(int n, Complex beta) {
  check_order(n);
  double x = std::norm(beta) * std::norm(beta) / 4.0;  // |beta|^4 / 4
  // Terminating 1F2(-n; 1/2 - n, 1; x); every term is positive since the two
  // alternating Pochhammer signs cancel.
  double term = 1.0, series = 1.0;
  for (int j = 0; j < n; ++j) {
    term *= (double(-n + j) / ((0.5 - double(n) + j) * double(1 + j))) * x /
            double(j + 1);
    series += term;
  }
  double prefactor = std::exp(double(n) * std::log(4.0) + log_factorial(n) +
                              std::lgamma(double(n) + 0.5) -
                              0.5 * std::log(M_PI));
  return prefactor * series;
}

FockVector cat_state(const FockSpace& space, Complex beta) {
  double theta = std::norm(beta) * (M_PI - 2.0 * std::arg(beta));
  Complex ib = Complex(0.0, 1.0) * beta;
  FockVector plus = coherent_state(space, ib);
  FockVector minus = coherent_state(space, -ib);
  CVec v = std::polar(1.0 / std::sqrt(2.0), theta) * (plus.amp + minus.amp);
  return {space, std::move(v)};
}

double cat_overlap_closed_form(int n) {
  check_order(n);
  double log_n = std::log(double(n));
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> logs(n + 1);
  for (int k = 0; k <= n; ++k) {
    logs[k] = 2.0 * log_binomial(n, k) + log_factorial(2 * k) -
              2.0 * double(k) * log_n;
    max_log = std::max(max_log, logs[k]);
  }
  double sum = 0.0;
  for (double l : logs) sum += std::exp(l - max_log);
  double log_val = std::log(2.0) + double(n) * (std::log(4.0) - 1.0) -
                   (max_log + std::log(sum));
  return std::exp(log_val);
}

double cat_overlap_numeric(int n, const FockSpace& space) {
  check_order(n);
  Complex beta(std::sqrt(double(n)), 0.0);
  FockVector psi = cat_like_state(space, n, beta).first;
  FockVector cat = cat_state(space, beta);
  return std::norm(inner_product(cat, psi));
}

std::pair<Scheme, DesignReport> cat_scheme(int n, Complex beta,
                                           const BeamSplitter& bs) {
  check_order(n);
  // The target polynomial has two zeros +-beta of multiplicity n each; the
  // root finder smears each into a cluster of radius ~ eps^{1/n}, so the
  // clustering tolerance must grow with n while staying well below the
  // +-beta separation.
  double eps = std::numeric_limits<double>::epsilon();
  double cluster_tol =
      std::max(1e-6, 25.0 * std::pow(eps, 1.0 / double(n)));
  if (2.0 * std::abs(beta) <= 4.0 * cluster_tol * (1.0 + std::abs(beta))) {
    throw std::invalid_argument(
        "cat-like zeros +-beta too close to resolve at order " +
        std::to_string(n) + " (|beta| = " + std::to_string(std::abs(beta)) +
        ")");
  }

  FockSpace space(2 * n + 2);
  FockVector target = cat_like_state(space, n, beta).first;
  DesignOptions opts;
  opts.cluster_tol = cluster_tol;
  auto [scheme, report] = design_scheme(target, bs, true, opts);

  if (scheme.stages.size() != 2 || scheme.stages[0].clicks != n ||
      scheme.stages[1].clicks != n) {
    throw DesignVerificationFailed(
        "cat-like design produced an unexpected stage pattern (" +
            std::to_string(scheme.stages.size()) + " stages)",
        0.0);
  }
  double zero_tol = 1e-6 * (1.0 + std::abs(beta));
  for (const RootCluster& c : report.zeros) {
    double off = std::min(std::abs(c.value - beta), std::abs(c.value + beta));
    if (off > zero_tol) {
      throw DesignVerificationFailed(
          "recovered cat-like zero off by " + std::to_string(off), 0.0);
    }
  }
  return {std::move(scheme), std::move(report)};
}

double cat_efficiency_closed_form(int n, Complex beta, const BeamSplitter& bs) {
  check_order(n);
  if (std::abs(bs.t) < 1e-15 || std::abs(bs.r) < 1e-15) {
    throw std::invalid_argument("closed-form efficiency needs nonzero t and r");
  }
  double tsq = bs.tsq(), rsq = bs.rsq();
  double log_val = std::log(cat_normalization_direct(n, beta)) +
                   double(n) * (2.0 * std::log(rsq) + std::log(tsq)) -
                   2.0 * log_factorial(n);
  double one_minus = 1.0 - 2.0 * tsq;
  log_val -= rsq * std::norm(beta) / tsq * (1.0 + one_minus * one_minus / tsq);
  return std::exp(log_val);
}

DisplacedOverlapReport displaced_superposition_overlap(const FockOperator& rho,
                                                       Complex beta1,
                                                       Complex beta2,
                                                       const BeamSplitter& bs) {
  validate_density_operator(rho, 1e-9);
  DisplacedOverlapReport out;
  out.gamma = (beta1 + beta2) / 2.0;
  out.beta = (beta1 - beta2) / Complex(0.0, 2.0);
  out.n_used = std::max(1, int(std::lround(std::norm(out.beta))));
  if (out.n_used > 16) {
    throw std::invalid_argument(
        "component separation needs " + std::to_string(out.n_used) +
        " clicks per stage; designs above 16 are not supported");
  }

  auto [scheme, report] = cat_scheme(out.n_used, out.beta, bs);

  double reach = std::max({std::abs(out.gamma), std::abs(beta1),
                           std::abs(beta2)});
  int cutoff = std::max(report.verify_cutoff,
                        rho.space.cutoff + cutoff_for_amplitude(reach) + 8);
  FockSpace work(cutoff);
  FockOperator rho_w = embed(rho, work);

  FockOperator shift = displacement_operator(work, -out.gamma);
  FockOperator rho_disp{work,
                        shift.matrix * rho_w.matrix * shift.matrix.adjoint()};
  double p = joint_event_probability(rho_disp, scheme);
  out.efficiency = efficiency_numeric(work, scheme);
  out.pipeline = overlap_from_probability(p, out.efficiency);

  CVec sup = coherent_state(work, beta1).amp + coherent_state(work, beta2).amp;
  sup /= sup.norm();
  out.direct = std::clamp((sup.adjoint() * rho_w.matrix * sup)(0).real(), 0.0,
                          1.0);
  return out;
}

}  // namespace qov
