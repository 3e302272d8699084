#include "qov/phase.hpp"

#include <cmath>
#include <string>

namespace qov {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// rho may live in a larger space but must have no weight above level `top`.
void check_support(const FockOperator& rho, int top, const char* what) {
  const CMat& m = rho.matrix;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if ((i > top || j > top) && std::abs(m(i, j)) > 1e-12) {
        throw std::invalid_argument(std::string(what) +
                                    ": input state has support above level " +
                                    std::to_string(top));
      }
    }
  }
}

}  // namespace

FockVector london_phase_state(const FockSpace& space, int n_trunc, double phi) {
  if (n_trunc < 0 || n_trunc >= space.cutoff) {
    throw std::invalid_argument("phase-state truncation " +
                                std::to_string(n_trunc) +
                                " outside cutoff " + std::to_string(space.cutoff));
  }
  CVec v = CVec::Zero(space.cutoff);
  double norm = 1.0 / std::sqrt(double(n_trunc) + 1.0);
  for (int n = 0; n <= n_trunc; ++n) {
    v[n] = std::polar(norm, phi * n);
  }
  return {space, std::move(v)};
}

double canonical_overlap_formula(Complex z, double phi, int n_trunc) {
  if (n_trunc < 1) throw std::invalid_argument("truncation must be >= 1");
  double zz = std::norm(z);
  double psi = std::arg(z);
  return (1.0 + zz + 2.0 * std::abs(z) * std::cos(phi - psi)) /
         ((double(n_trunc) + 1.0) * (1.0 + zz));
}

Scheme canonical_phase_scheme(double phi, const BeamSplitter& bs) {
  Complex alpha =
      -(std::conj(bs.r) / std::conj(bs.t)) * std::polar(1.0, phi);
  return {bs, {{alpha, 1}}, true};
}

double canonical_efficiency(const BeamSplitter& bs) {
  double ratio = std::norm(bs.r) / std::norm(bs.t);
  return 2.0 * std::norm(bs.r) * std::exp(-ratio);
}

std::vector<double> canonical_phase_distribution(
    const FockOperator& rho, int n_trunc, const BeamSplitter& bs,
    const std::vector<double>& phi_grid) {
  if (n_trunc < 1) throw std::invalid_argument("truncation must be >= 1");
  check_support(rho, n_trunc, "canonical phase distribution");

  // Design once at phi = 0. Rotating phi multiplies every zero by e^{i phi},
  // hence every stage amplitude by e^{i phi}, which conjugates the cascade by
  // the number-operator rotation; moving that rotation onto the projection
  // vector gives v_phi[n] = e^{i n phi} v_0[n] with phi-independent norm.
  FockSpace base(n_trunc + 1);
  auto [scheme, report] =
      design_scheme(london_phase_state(base, n_trunc, 0.0), bs, false);
  FockSpace work(report.verify_cutoff);
  FockVector v0 = cascade_projection(work, scheme);
  double eff = v0.squared_norm();

  if (rho.space.cutoff > work.cutoff) {
    throw std::invalid_argument("input state cutoff exceeds the working space");
  }
  FockOperator rho_w = rho.space.cutoff == work.cutoff
                           ? rho
                           : embed(rho, work);
  validate_density_operator(rho_w, 1e-9);

  const double scale = (double(n_trunc) + 1.0) / kTwoPi;
  std::vector<double> prob;
  prob.reserve(phi_grid.size());
  CVec v_phi(work.cutoff);
  for (double phi : phi_grid) {
    for (int n = 0; n < work.cutoff; ++n) {
      v_phi[n] = v0.amp[n] * std::polar(1.0, phi * n);
    }
    double p = (v_phi.adjoint() * rho_w.matrix * v_phi)(0).real();
    prob.push_back(scale * std::max(p, 0.0) / eff);
  }
  return prob;
}

Complex trig_normalization(const PhasePoint& pt) {
  if (pt.n_trunc < 1) throw std::invalid_argument("truncation must be >= 1");
  double s = std::sin(pt.phi);
  if (std::abs(s) < 1e-9) {
    throw DegeneratePhase("trig phase state degenerates at sin(phi) = 0");
  }
  double np1 = double(pt.n_trunc) + 1.0;
  double brace =
      2.0 - 2.0 * std::sin(np1 * pt.phi) * std::cos((np1 + 1.0) * pt.phi) /
                (np1 * s);
  if (brace < 1e-12) {
    throw DegeneratePhase("trig phase state has vanishing norm at phi = " +
                          std::to_string(pt.phi));
  }
  return Complex(0.0, -1.0) / std::sqrt(brace);
}

FockVector trig_phase_state(const FockSpace& space, const PhasePoint& pt) {
  Complex c = trig_normalization(pt);
  FockVector plus = london_phase_state(space, pt.n_trunc, pt.chi + pt.phi);
  FockVector minus = london_phase_state(space, pt.n_trunc, pt.chi - pt.phi);
  CVec v = c * (std::polar(1.0, pt.phi) * plus.amp -
                std::polar(1.0, -pt.phi) * minus.amp);
  FockVector out(space, std::move(v));
  if (std::abs(out.norm() - 1.0) > 1e-10) {
    throw Error("trig phase state normalization drifted to " +
                std::to_string(out.norm()));
  }
  return out;
}

double trig_overlap_formula(Complex z, const PhasePoint& pt) {
  Complex c = trig_normalization(pt);
  double zz = std::norm(z);
  double psi = std::arg(z);
  double s1 = std::sin(pt.phi), s2 = std::sin(2.0 * pt.phi);
  double bracket = s1 * s1 +
                   2.0 * std::abs(z) * std::cos(psi - pt.chi) * s1 * s2 +
                   zz * s2 * s2;
  return 4.0 * std::norm(c) / ((double(pt.n_trunc) + 1.0) * (1.0 + zz)) *
         bracket;
}

Scheme trig_phase_scheme(const PhasePoint& pt, const BeamSplitter& bs) {
  double c = std::cos(pt.phi);
  if (std::abs(c) < 1e-12) {
    throw DegeneratePhase("stage amplitude diverges at cos(phi) = 0");
  }
  Complex alpha = -(std::conj(bs.r) / (2.0 * std::conj(bs.t) * c)) *
                  std::polar(1.0, pt.chi);
  return {bs, {{alpha, 1}}, true};
}

double trig_efficiency(double phi, const BeamSplitter& bs) {
  double s2 = std::sin(2.0 * phi);
  if (std::abs(s2) < 1e-9) {
    throw DegeneratePhase("trig efficiency undefined at sin(2 phi) = 0");
  }
  double c = std::cos(phi);
  double amp_sq = std::norm(bs.r) / (4.0 * std::norm(bs.t) * c * c);
  return (1.0 - c * std::cos(3.0 * phi)) / (s2 * s2) * std::norm(bs.r) *
         std::exp(-amp_sq);
}

TrigDistribution trig_distribution(const FockOperator& rho, double chi,
                                   const BeamSplitter& bs,
                                   const std::vector<double>& phi_grid,
                                   double alpha_cap) {
  validate_density_operator(rho, 1e-9);
  TrigDistribution dist;
  dist.prob.reserve(phi_grid.size());
  dist.via_measurement.reserve(phi_grid.size());

  for (double phi : phi_grid) {
    PhasePoint pt{phi, chi, 1};
    Complex c_norm = trig_normalization(pt);  // throws on degenerate phi
    double scale = 1.0 / (M_PI * std::norm(c_norm));
    double cos_phi = std::cos(phi);
    double alpha_abs = std::abs(bs.r) / (2.0 * std::abs(bs.t) *
                                         std::max(std::abs(cos_phi), 1e-300));

    double overlap;
    bool measured = std::abs(cos_phi) > 1e-12 && alpha_abs <= alpha_cap;
    if (measured) {
      Scheme scheme = trig_phase_scheme(pt, bs);
      int cutoff = std::max(working_cutoff(scheme, 1), rho.space.cutoff);
      FockSpace work(cutoff);
      FockVector v = cascade_projection(work, scheme);
      FockOperator rho_w =
          rho.space.cutoff == work.cutoff ? rho : embed(rho, work);
      double p = (v.amp.adjoint() * rho_w.matrix * v.amp)(0).real();
      overlap = std::max(p, 0.0) / v.squared_norm();
    } else {
      // Near phi = pi/2 the stage amplitude diverges; fall back to the
      // direct overlap with the state itself.
      FockSpace work(std::max(rho.space.cutoff, 2));
      FockOperator rho_w =
          rho.space.cutoff == work.cutoff ? rho : embed(rho, work);
      FockVector psi = trig_phase_state(work, pt);
      double p = (psi.amp.adjoint() * rho_w.matrix * psi.amp)(0).real();
      overlap = std::max(p, 0.0);
    }
    dist.prob.push_back(scale * overlap);
    dist.via_measurement.push_back(measured ? 1 : 0);
  }
  return dist;
}

double optimal_transmittance(double phi) {
  double c2 = std::cos(phi) * std::cos(phi);
  return 2.0 / (1.0 + std::sqrt(1.0 + 16.0 * c2));
}

std::vector<double> midpoint_grid(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> g(n);
  double h = (b - a) / n;
  for (int i = 0; i < n; ++i) g[i] = a + (i + 0.5) * h;
  return g;
}

}  // namespace qov
