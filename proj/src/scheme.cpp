#include "qov/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

namespace qov {

namespace {

void check_nondegenerate(const BeamSplitter& bs, const char* what) {
  if (std::abs(bs.t) < 1e-15 || std::abs(bs.r) < 1e-15) {
    throw std::invalid_argument(std::string(what) +
                                " needs strictly nonzero t and r");
  }
}

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

// Coefficients (ascending in a^dag) of q(t* x + b) for coefficient vector q.
std::vector<Complex> compose_affine(const std::vector<Complex>& q, Complex scale,
                                    Complex shift) {
  std::vector<Complex> out(q.size(), Complex(0.0));
  for (size_t j = 0; j < q.size(); ++j) {
    // (scale x + shift)^j expanded with binomials.
    Complex binom_term = q[j];
    // walk k = j down to 0 with C(j,k) scale^k shift^(j-k)
    for (size_t k = 0; k <= j; ++k) {
      double binom = std::exp(log_factorial(int(j)) - log_factorial(int(k)) -
                              log_factorial(int(j - k)));
      out[k] += binom_term * binom * std::pow(scale, double(k)) *
                std::pow(shift, double(j - k));
    }
  }
  return out;
}

std::vector<Complex> multiply_linear_power(std::vector<Complex> q, Complex root,
                                           int power) {
  // q(x) <- (x - root)^power q(x)
  for (int p = 0; p < power; ++p) {
    std::vector<Complex> out(q.size() + 1, Complex(0.0));
    for (size_t k = 0; k < q.size(); ++k) {
      out[k + 1] += q[k];
      out[k] -= root * q[k];
    }
    q = std::move(out);
  }
  return q;
}

FockVector projection_from_stages(const FockSpace& space,
                                  const BeamSplitter& bs,
                                  const std::vector<Stage>& stages) {
  check_nondegenerate(bs, "product form");
  const Complex t = bs.t, r = bs.r;
  // Polynomial in a^dag built by running the cascade adjoint analytically:
  // stage i (applied to vacuum last-to-first) contributes a factor
  // (-r)^{d_i}/sqrt(d_i!) (x - (t/r) conj(alpha_i))^{d_i} and the affine
  // substitution x -> t* x + r* conj(alpha_i) on everything built so far.
  std::vector<Complex> q{Complex(1.0)};
  double log_norm = 0.0;
  Complex sign = 1.0;
  for (int i = static_cast<int>(stages.size()) - 1; i >= 0; --i) {
    const Stage& st = stages[i];
    Complex ac = std::conj(st.alpha);
    q = compose_affine(q, std::conj(t), std::conj(r) * ac);
    q = multiply_linear_power(std::move(q), (t / r) * ac, st.clicks);
    log_norm += -0.5 * std::norm(st.alpha) +
                double(st.clicks) * std::log(std::abs(r)) -
                0.5 * log_factorial(st.clicks);
    sign *= std::pow(-r / std::abs(r), double(st.clicks));
  }
  int top = static_cast<int>(q.size()) - 1;
  if (top >= space.cutoff) {
    throw TooManyZerosForCutoff("projection polynomial degree " +
                                std::to_string(top) + " needs larger cutoff");
  }
  CVec v = CVec::Zero(space.cutoff);
  for (int k = 0; k <= top; ++k) {
    v[k] = sign * q[k] * std::exp(log_norm + 0.5 * log_factorial(k));
  }
  return {space, std::move(v)};
}

}  // namespace

BeamSplitter::BeamSplitter(Complex t_, Complex r_) : t(t_), r(r_) {
  double sum = std::norm(t) + std::norm(r);
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("beam splitter violates |t|^2 + |r|^2 = 1 by " +
                                std::to_string(sum - 1.0));
  }
}

BeamSplitter BeamSplitter::from_transmittance(double tsq) {
  if (!(tsq > 0.0 && tsq < 1.0)) {
    throw std::invalid_argument("transmittance must lie in (0,1), got " +
                                std::to_string(tsq));
  }
  return {std::sqrt(tsq), std::sqrt(1.0 - tsq)};
}

int Scheme::total_clicks() const {
  int total = 0;
  for (const Stage& s : stages) total += s.clicks;
  return total;
}

FockOperator stage_operator(const FockSpace& space, const BeamSplitter& bs,
                            const Stage& stage) {
  check_nondegenerate(bs, "stage operator");
  if (stage.clicks < 1) {
    throw std::invalid_argument("stage needs clicks >= 1");
  }
  const Complex rc = std::conj(bs.r);
  const Complex tc = std::conj(bs.t);
  FockOperator d_in = displacement_operator(space, -(tc / rc) * stage.alpha);
  FockOperator d_out = displacement_operator(space, stage.alpha / rc);
  FockOperator atten = attenuation_operator(space, bs.t);

  // (-r* a)^clicks / sqrt(clicks!)
  FockOperator a = annihilation_operator(space);
  CMat click_part = CMat::Identity(space.cutoff, space.cutoff);
  for (int k = 0; k < stage.clicks; ++k) click_part = (-rc) * (a.matrix * click_part);
  click_part /= std::exp(0.5 * log_factorial(stage.clicks));

  CMat m = d_out.matrix * atten.matrix * click_part * d_in.matrix;
  return {space, std::move(m)};
}

FockOperator cascade_operator(const FockSpace& space, const Scheme& scheme) {
  FockOperator y = FockOperator::identity(space);
  for (const Stage& st : scheme.stages) {
    y = stage_operator(space, scheme.bs, st) * y;
  }
  return y;
}

FockVector cascade_projection(const FockSpace& space, const Scheme& scheme) {
  FockOperator y = cascade_operator(space, scheme);
  // Y^dag |0> = conjugate of the top row of Y.
  CVec v = y.matrix.row(0).conjugate().transpose();
  return {space, std::move(v)};
}

std::vector<Complex> alphas_from_zeros(const std::vector<Complex>& zeros,
                                       const BeamSplitter& bs) {
  check_nondegenerate(bs, "alphas_from_zeros");
  const Complex t = bs.t, rc = std::conj(bs.r);
  const double tsq = std::norm(t);
  std::vector<Complex> alphas(zeros.size());
  Complex tc_pow = std::conj(t);  // (t*)^{k+1} accumulator, k starting at 1
  for (size_t k = 0; k < zeros.size(); ++k) {
    tc_pow *= std::conj(t);
    Complex sum = 0.0;
    double tsq_pow = 1.0;
    for (size_t l = 0; l <= k; ++l) {
      tsq_pow *= tsq;
      Complex prev = (l == 0) ? Complex(0.0) : zeros[l - 1];
      sum += tsq_pow * (zeros[l] - prev);
    }
    alphas[k] = rc / (t * tc_pow) * sum;
  }
  return alphas;
}

std::vector<Complex> zeros_from_alphas(const std::vector<Complex>& alphas,
                                       const BeamSplitter& bs) {
  check_nondegenerate(bs, "zeros_from_alphas");
  const Complex t = bs.t, tc = std::conj(bs.t), rc = std::conj(bs.r);
  std::vector<Complex> zeros(alphas.size());
  Complex t_pow = 1.0;
  Complex sum = 0.0;
  for (size_t k = 0; k < alphas.size(); ++k) {
    t_pow *= t;
    Complex prev = (k == 0) ? Complex(0.0) : alphas[k - 1];
    sum += (tc * alphas[k] - prev) / t_pow;
    zeros[k] = (t / rc) * sum;
  }
  return zeros;
}

int working_cutoff(const Scheme& scheme, int top_index, double tail_tol,
                   int margin) {
  double max_arg = 0.0;
  for (const Stage& st : scheme.stages) {
    max_arg = std::max(max_arg, std::abs(st.alpha) / std::abs(scheme.bs.r));
  }
  int c = cutoff_for_amplitude(max_arg, tail_tol, top_index + 1);
  return c + margin + scheme.total_clicks();
}

double efficiency_numeric(const FockSpace& space, const Scheme& scheme) {
  return cascade_projection(space, scheme).squared_norm();
}

double scheme_efficiency_closed_form(const FockVector& target,
                                     const Scheme& scheme) {
  check_nondegenerate(scheme.bs, "closed-form efficiency");
  FockVector psi = target.normalized();
  int n_total = scheme.total_clicks();
  if (psi.top_index() != n_total) {
    throw std::invalid_argument(
        "scheme click total " + std::to_string(n_total) +
        " does not match target top index " + std::to_string(psi.top_index()));
  }
  double log_r = std::log(std::abs(scheme.bs.r));
  double log_t = std::log(std::abs(scheme.bs.t));
  double log_val = log_factorial(n_total) - std::log(std::norm(psi.amp[n_total]));
  int stage_weight = 0;  // sum over stages of (stage index - 1) * clicks
  for (size_t i = 0; i < scheme.stages.size(); ++i) {
    const Stage& st = scheme.stages[i];
    log_val += 2.0 * double(st.clicks) * log_r - log_factorial(st.clicks);
    log_val -= std::norm(st.alpha);
    stage_weight += static_cast<int>(i) * st.clicks;
  }
  log_val += 2.0 * double(stage_weight) * log_t;
  return std::exp(log_val);
}

double efficiency_closed_form(const FockVector& target, const BeamSplitter& bs,
                              const std::vector<Complex>& alphas) {
  Scheme single{bs, {}, true};
  for (Complex a : alphas) single.stages.push_back({a, 1});
  return scheme_efficiency_closed_form(target, single);
}

void validate_density_operator(const FockOperator& rho, double tol) {
  const CMat& m = rho.matrix;
  double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol) {
    throw NotAState("density operator not hermitian: max asymmetry " +
                    std::to_string(herm));
  }
  double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol) {
    throw NotAState("density operator trace " + std::to_string(tr));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) / 2.0);
  double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol) {
    throw NotAState("density operator has eigenvalue " +
                    std::to_string(min_eig));
  }
}

double joint_event_probability(const FockOperator& rho_in,
                               const Scheme& scheme) {
  validate_density_operator(rho_in, 1e-9);
  FockVector v = cascade_projection(rho_in.space, scheme);
  double p = (v.amp.adjoint() * rho_in.matrix * v.amp)(0).real();
  return std::max(p, 0.0);
}

double overlap_from_probability(double p, double efficiency) {
  if (!(efficiency > 0.0)) {
    throw std::invalid_argument("efficiency must be positive");
  }
  if (p < -1e-12 * efficiency || p > efficiency * (1.0 + 1e-9)) {
    throw InconsistentProbability(
        "probability " + std::to_string(p) +
        " outside [0, efficiency = " + std::to_string(efficiency) + "]");
  }
  return std::clamp(p / efficiency, 0.0, 1.0);
}

FockVector product_form_projection(const FockSpace& space,
                                   const BeamSplitter& bs,
                                   const std::vector<Complex>& alphas) {
  std::vector<Stage> stages;
  for (Complex a : alphas) stages.push_back({a, 1});
  return projection_from_stages(space, bs, stages);
}

std::pair<Scheme, DesignReport> design_scheme(const FockVector& target,
                                              const BeamSplitter& bs,
                                              bool merge_degenerate,
                                              const DesignOptions& opts) {
  check_nondegenerate(bs, "design");
  FockVector psi = target.normalized();

  // A vacuum target needs no stages: the final detector alone projects on |0>.
  std::vector<RootCluster> clusters;
  double residual = 0.0;
  if (psi.top_index() > 0) {
    Polynomial poly(zero_polynomial_coefficients(psi));
    std::vector<Complex> raw = roots(poly);
    if (merge_degenerate) {
      clusters = cluster_roots(raw, opts.cluster_tol);
      for (RootCluster& c : clusters) {
        if (c.multiplicity > 1) {
          c.value = refine_multiple_root(poly, c.value, c.multiplicity);
        }
      }
    } else {
      clusters.reserve(raw.size());
      for (Complex r : raw) clusters.push_back({r, 1});
    }
    for (const RootCluster& c : clusters) {
      residual = std::max(residual, poly.relative_residual(c.value));
    }
  }

  std::vector<Complex> stage_zeros;
  stage_zeros.reserve(clusters.size());
  for (const RootCluster& c : clusters) stage_zeros.push_back(c.value);
  std::vector<Complex> alphas = alphas_from_zeros(stage_zeros, bs);

  Scheme scheme{bs, {}, true};
  for (size_t i = 0; i < clusters.size(); ++i) {
    scheme.stages.push_back({alphas[i], clusters[i].multiplicity});
  }

  // Self-check: rebuild the projection vector at a comfortable cutoff and
  // compare rays; also require the two efficiency routes to agree.
  int verify_cutoff = working_cutoff(scheme, psi.top_index(), opts.tail_tol,
                                     opts.cutoff_margin);
  FockSpace vspace(verify_cutoff);
  FockVector v = cascade_projection(vspace, scheme);
  double fid = fidelity_up_to_phase(v, embed(psi, vspace));
  if (fid < opts.min_fidelity) {
    throw DesignVerificationFailed(
        "designed cascade reproduces the target with fidelity " +
            std::to_string(fid),
        fid);
  }
  double eff_numeric = v.squared_norm();
  double eff_closed = scheme_efficiency_closed_form(psi, scheme);
  if (std::abs(eff_closed - eff_numeric) > 1e-6 * eff_closed) {
    throw DesignVerificationFailed(
        "closed-form efficiency " + std::to_string(eff_closed) +
            " disagrees with numeric " + std::to_string(eff_numeric),
        fid);
  }

  DesignReport report{psi,        clusters,    alphas, eff_closed,
                      eff_numeric, residual,   verify_cutoff};
  return {std::move(scheme), std::move(report)};
}

}  // namespace qov
