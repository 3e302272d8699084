// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single [PASS]/[FAIL] line with the measured numbers and the
// runtime against its budget. Exits nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "qov/cat.hpp"
#include "qov/fock.hpp"
#include "qov/oracle.hpp"
#include "qov/phase.hpp"
#include "qov/sampler.hpp"
#include "qov/scheme.hpp"

using namespace qov;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Complex unit_phase(std::mt19937& gen) {
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  return std::polar(1.0, angle(gen));
}

// Admissible random splitters stay away from the strongly reflecting corner,
// where designed efficiencies sink to the double-precision floor and relative
// comparisons stop measuring the algebra.
BeamSplitter tame_splitter(std::mt19937& gen) {
  std::uniform_real_distribution<double> tsq_dist(0.4, 0.75);
  double tsq = tsq_dist(gen);
  return {std::sqrt(tsq) * unit_phase(gen),
          std::sqrt(1.0 - tsq) * unit_phase(gen)};
}

std::vector<Complex> tame_zeros(std::mt19937& gen, int count) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<Complex> zs;
  while (int(zs.size()) < count) {
    Complex z(coord(gen), coord(gen));
    bool ok = std::abs(z) >= 0.25;
    for (Complex w : zs) ok = ok && std::abs(z - w) >= 0.4;
    if (ok) zs.push_back(z);
  }
  return zs;
}

FockOperator random_density(const FockSpace& space, int top, int rank,
                            std::mt19937& gen) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  CMat rho = CMat::Zero(space.cutoff, space.cutoff);
  double total = 0.0;
  for (int k = 0; k < rank; ++k) {
    CVec v = CVec::Zero(space.cutoff);
    for (int n = 0; n <= top; ++n) v[n] = Complex(coord(gen), coord(gen));
    double w = 0.1 + std::abs(coord(gen));
    rho += w * (v * v.adjoint()) / v.squaredNorm();
    total += w;
  }
  rho /= total;
  rho = (rho + rho.adjoint()) / 2.0;
  return {space, std::move(rho)};
}

double direct_overlap(const FockVector& target, const FockOperator& rho) {
  FockVector psi = embed(target, rho.space).normalized();
  return (psi.amp.adjoint() * rho.matrix * psi.amp)(0).real();
}

// --------------------------------------------------------------------------
// 1. The single-detector scheme for the flat two-level phase superposition
//    peaks near |T|^2 = 0.62 with efficiency near 0.41 on a 1e-3 grid.

Outcome criterion_1() {
  double best_t = 0.0, best_v = -1.0;
  for (int k = 1; k <= 999; ++k) {
    double tsq = 1e-3 * k;
    double eff = canonical_efficiency(BeamSplitter::from_transmittance(tsq));
    if (eff > best_v) {
      best_v = eff;
      best_t = tsq;
    }
  }
  Outcome o;
  o.pass = std::abs(best_t - 0.62) <= 0.005 && std::abs(best_v - 0.41) <= 0.005;
  o.detail = "argmax |T|^2 = " + num(best_t) + " vs 0.62, max = " +
             num(best_v) + " vs 0.41";
  return o;
}

// --------------------------------------------------------------------------
// 2. The trigonometric-phase scheme: its best efficiency stays inside
//    (0.36, 0.52) across the phase interval, and the closed-form optimal
//    transmittance lands within one 1e-3 grid step of a brute-force search.

Outcome criterion_2() {
  double lo = 1e300, hi = -1e300;
  for (double phi : midpoint_grid(0.0, M_PI, 64)) {
    BeamSplitter bs =
        BeamSplitter::from_transmittance(optimal_transmittance(phi));
    double best = trig_efficiency(phi, bs);
    lo = std::min(lo, best);
    hi = std::max(hi, best);
  }
  bool band_ok = lo > 0.36 && hi < 0.52;

  double worst_gap = 0.0;
  for (double phi : {0.3, 0.7, 1.1, 1.5}) {
    double best_t = 0.0, best_v = -1.0;
    for (int k = 1; k <= 999; ++k) {
      double tsq = 1e-3 * k;
      double v = trig_efficiency(phi, BeamSplitter::from_transmittance(tsq));
      if (v > best_v) {
        best_v = v;
        best_t = tsq;
      }
    }
    worst_gap = std::max(worst_gap, std::abs(best_t - optimal_transmittance(phi)));
  }
  bool arg_ok = worst_gap <= 1e-3 + 1e-12;

  Outcome o;
  o.pass = band_ok && arg_ok;
  o.detail = "max-over-|T| band [" + num(lo) + ", " + num(hi) +
             "] inside (0.36, 0.52), formula vs grid argmax gap " +
             num(worst_gap, "%.2e");
  return o;
}

// --------------------------------------------------------------------------
// 3. Squeezed-number-like cat approximants: the closed-form overlap with the
//    even coherent superposition matches the state-vector value to 1e-8 for
//    n = 1..8 and exceeds 0.95 from n = 3 on.

Outcome criterion_3() {
  FockSpace space(64);
  double worst_gap = 0.0, min_large = 1.0;
  for (int n = 1; n <= 8; ++n) {
    double closed = cat_overlap_closed_form(n);
    double numeric = cat_overlap_numeric(n, space);
    worst_gap = std::max(worst_gap, std::abs(closed - numeric));
    if (n >= 3) min_large = std::min(min_large, std::min(closed, numeric));
  }
  Outcome o;
  o.pass = worst_gap <= 1e-8 && min_large > 0.95;
  o.detail = "closed vs numeric gap " + num(worst_gap, "%.2e") +
             " <= 1e-8, min overlap for n >= 3 is " + num(min_large);
  return o;
}

// --------------------------------------------------------------------------
// 4. Measured-overlap identity on 100 random cases: recovering
//    <psi|rho|psi> from the joint click probability divided by the
//    efficiency agrees with the direct matrix element to 1e-9, and designs
//    with merged multi-click stages agree with their fully split versions
//    to 1e-8 on the recovered overlap.

Outcome criterion_4() {
  std::mt19937 gen(20260823);
  double worst_id = 0.0, worst_merge = 0.0;
  int merge_cases = 0;
  for (int trial = 0; trial < 100; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    bool degenerate = trial % 3 == 0;
    int distinct = degenerate ? 1 + int(gen() % 3) : 1 + int(gen() % 4);
    std::vector<Complex> zeros = tame_zeros(gen, distinct);
    if (degenerate) zeros.push_back(zeros[0]);
    int n = int(zeros.size());
    FockVector target = state_from_zeros(FockSpace(n + 1), zeros);

    auto [scheme, report] = design_scheme(target, bs, true);
    int cutoff = report.verify_cutoff;
    Scheme plain{bs, {}, true};
    if (degenerate) {
      auto [p, prep] = design_scheme(target, bs, false);
      plain = p;
      cutoff = std::max(cutoff, prep.verify_cutoff);
      ++merge_cases;
    }

    FockSpace space(cutoff);
    FockOperator rho = random_density(space, n, 1 + int(gen() % 3), gen);
    double recovered =
        overlap_from_probability(joint_event_probability(rho, scheme),
                                 efficiency_numeric(space, scheme));
    worst_id = std::max(worst_id,
                        std::abs(recovered - direct_overlap(target, rho)));
    if (degenerate) {
      double split =
          overlap_from_probability(joint_event_probability(rho, plain),
                                   efficiency_numeric(space, plain));
      worst_merge = std::max(worst_merge, std::abs(recovered - split));
    }
  }
  Outcome o;
  o.pass = worst_id <= 1e-9 && worst_merge <= 1e-8;
  o.detail = "identity gap " + num(worst_id, "%.2e") + " <= 1e-9 (100 cases)" +
             ", merged vs split gap " + num(worst_merge, "%.2e") +
             " <= 1e-8 (" + std::to_string(merge_cases) + " cases)";
  return o;
}

// --------------------------------------------------------------------------
// 5. Two-mode oracle equivalence: the composed one-mode stage operator and
//    the project-the-ancilla oracle agree to operator fidelity 1 - 1e-9 on
//    the photon numbers the targets occupy, and whole-cascade probabilities
//    agree to 1e-9 relative.

Outcome criterion_5() {
  std::mt19937 gen(5150);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);

  // Compare on the leading columns with workspace above: cropped operator
  // products are only faithful for inputs whose photon content clears the
  // cutoff comfortably.
  FockSpace space(48);
  const int kCols = 11;
  double worst_fid_gap = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    Stage st{Complex(coord(gen), coord(gen)), 1 + int(gen() % 3)};
    CMat closed = stage_operator(space, bs, st).matrix.leftCols(kCols);
    CMat oracle =
        conditional_stage_oracle(space, bs, st.alpha, st.clicks).matrix
            .leftCols(kCols);
    double fid = std::norm((closed.adjoint() * oracle).trace()) /
                 (closed.squaredNorm() * oracle.squaredNorm());
    worst_fid_gap = std::max(worst_fid_gap, 1.0 - fid);
  }
  bool stages_ok = worst_fid_gap <= 1e-9;

  std::uniform_real_distribution<double> small(-0.8, 0.8);
  FockSpace cspace(28);
  FockVector probe = coherent_state(cspace, Complex(0.6, 0.3));
  FockOperator rho(cspace, probe.amp * probe.amp.adjoint());
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    Scheme scheme{bs, {}, true};
    int stages = 1 + int(gen() % 3);
    for (int s = 0; s < stages; ++s) {
      scheme.stages.push_back(
          {Complex(small(gen), small(gen)), 1 + int(gen() % 2)});
    }
    double p = joint_event_probability(rho, scheme);
    double q = cascade_probability_oracle(rho, scheme);
    worst_rel =
        std::max(worst_rel, std::abs(p - q) / std::max({p, q, 1e-30}));
  }
  bool cascades_ok = worst_rel <= 1e-9;

  Outcome o;
  o.pass = stages_ok && cascades_ok;
  o.detail = "stage fidelity gap " + num(worst_fid_gap, "%.2e") +
             " <= 1e-9 (50 draws), cascade relative gap " +
             num(worst_rel, "%.2e") + " <= 1e-9 (20 schemes)";
  return o;
}

// --------------------------------------------------------------------------
// 6. Closed-form algebra: the product form of the projection vector, the
//    amplitude/zero round trip, both efficiency closed forms, and the two
//    normalization routes for the cat-like family.

Outcome criterion_6() {
  std::mt19937 gen(818);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);

  double worst_pf = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    int n = 1 + int(gen() % 4);
    std::vector<Complex> alphas =
        alphas_from_zeros(tame_zeros(gen, n), bs);
    Scheme scheme{bs, {}, true};
    for (Complex a : alphas) scheme.stages.push_back({a, 1});
    FockSpace space(working_cutoff(scheme, n));
    double fid = fidelity_up_to_phase(cascade_projection(space, scheme),
                                      product_form_projection(space, bs, alphas));
    worst_pf = std::max(worst_pf, 1.0 - fid);
  }
  bool product_ok = worst_pf <= 1e-9;

  double worst_rt = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    int n = 1 + int(gen() % 5);
    std::vector<Complex> alphas(n);
    for (Complex& a : alphas) a = Complex(coord(gen), coord(gen));
    std::vector<Complex> back =
        alphas_from_zeros(zeros_from_alphas(alphas, bs), bs);
    for (int k = 0; k < n; ++k) {
      worst_rt = std::max(worst_rt, std::abs(back[k] - alphas[k]));
    }
  }
  bool roundtrip_ok = worst_rt <= 1e-12;

  double worst_eff = 0.0;
  for (int trial = 0; trial < 6; ++trial) {
    BeamSplitter bs = tame_splitter(gen);
    int n = 1 + int(gen() % 4);
    std::vector<Complex> zeros = tame_zeros(gen, n);
    FockVector target = state_from_zeros(FockSpace(n + 1), zeros);
    std::vector<Complex> alphas = alphas_from_zeros(zeros, bs);
    double closed = efficiency_closed_form(target, bs, alphas);
    Scheme scheme{bs, {}, true};
    for (Complex a : alphas) scheme.stages.push_back({a, 1});
    double numeric =
        efficiency_numeric(FockSpace(working_cutoff(scheme, n)), scheme);
    worst_eff = std::max(worst_eff, std::abs(closed - numeric) / closed);
  }
  bool eff_ok = worst_eff <= 1e-9;

  double worst_cat = 0.0;
  BeamSplitter cat_bs = BeamSplitter::from_transmittance(0.45);
  for (int n = 1; n <= 6; ++n) {
    Complex beta = std::sqrt(double(n));
    auto [scheme, report] = cat_scheme(n, beta, cat_bs);
    double closed = cat_efficiency_closed_form(n, beta, cat_bs);
    worst_cat = std::max(
        worst_cat, std::abs(closed - report.efficiency_numeric) / closed);
  }
  bool cat_ok = worst_cat <= 1e-8;

  double worst_norm = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (double b2 : {0.5, 3.0, 8.0}) {
      Complex beta = std::polar(std::sqrt(b2), 0.4);
      double direct = cat_normalization_direct(n, beta);
      double hyper = cat_normalization_hypergeometric(n, beta);
      worst_norm = std::max(worst_norm, std::abs(direct - hyper) / direct);
    }
  }
  bool norm_ok = worst_norm <= 1e-9;

  Outcome o;
  o.pass = product_ok && roundtrip_ok && eff_ok && cat_ok && norm_ok;
  o.detail = "product-form fidelity gap " + num(worst_pf, "%.2e") +
             ", round-trip gap " + num(worst_rt, "%.2e") +
             ", efficiency rel gap " + num(worst_eff, "%.2e") +
             ", cat efficiency rel gap " + num(worst_cat, "%.2e") +
             ", normalization rel gap " + num(worst_norm, "%.2e");
  return o;
}

// --------------------------------------------------------------------------
// 7. Vacuum phase distributions: flat 1/2pi through the rotating-scheme
//    pipeline, (2/pi) sin^2 phi through the trigonometric one, both
//    quadrature-normalized to 1.

Outcome criterion_7() {
  BeamSplitter bs = BeamSplitter::from_transmittance(0.62);
  FockSpace space(6);
  CMat vac_m = CMat::Zero(space.cutoff, space.cutoff);
  vac_m(0, 0) = 1.0;
  FockOperator vac(space, std::move(vac_m));

  std::vector<double> grid_full = midpoint_grid(0.0, 2.0 * M_PI, 48);
  std::vector<double> flat =
      canonical_phase_distribution(vac, 1, bs, grid_full);
  double worst_flat = 0.0, quad_flat = 0.0;
  for (double p : flat) {
    worst_flat = std::max(worst_flat, std::abs(p - 1.0 / (2.0 * M_PI)));
    quad_flat += p * (2.0 * M_PI / 48.0);
  }

  std::vector<double> grid_half = midpoint_grid(0.0, M_PI, 41);
  TrigDistribution trig = trig_distribution(vac, 0.0, bs, grid_half);
  double worst_trig = 0.0, quad_trig = 0.0;
  for (size_t i = 0; i < grid_half.size(); ++i) {
    double s = std::sin(grid_half[i]);
    worst_trig =
        std::max(worst_trig, std::abs(trig.prob[i] - 2.0 / M_PI * s * s));
    quad_trig += trig.prob[i] * (M_PI / 41.0);
  }

  Outcome o;
  o.pass = worst_flat <= 1e-10 && worst_trig <= 1e-10 &&
           std::abs(quad_flat - 1.0) <= 1e-6 && std::abs(quad_trig - 1.0) <= 1e-6;
  o.detail = "flat deviation " + num(worst_flat, "%.2e") +
             ", sine-squared deviation " + num(worst_trig, "%.2e") +
             ", quadrature 1 " + num(quad_flat - 1.0, "%+.1e") + " / 1 " +
             num(quad_trig - 1.0, "%+.1e");
  return o;
}

// --------------------------------------------------------------------------
// 8. A million-shot simulated run of the phase-superposition scheme on
//    |z = 0.6> recovers the exact overlap 16/17 within four binomial
//    standard errors, and the same seed reproduces the counts exactly.

Outcome criterion_8() {
  BeamSplitter bs = BeamSplitter::from_transmittance(0.62);
  Scheme scheme = canonical_phase_scheme(0.0, bs);
  FockSpace space(working_cutoff(scheme, 1));
  CVec v = CVec::Zero(space.cutoff);
  v[0] = 1.0;
  v[1] = 0.6;
  v /= v.norm();
  FockOperator rho(space, v * v.adjoint());

  const std::uint64_t shots = 1000000, seed = 8162023;
  double eff = efficiency_numeric(space, scheme);
  EventCounts counts = sample_cascade(rho, scheme, shots, seed);
  OverlapEstimate est = estimate_overlap(counts, eff);
  double truth = 16.0 / 17.0;
  bool stat_ok = std::abs(est.estimate - truth) <= 4.0 * est.std_error;

  EventCounts again = sample_cascade(rho, scheme, shots, seed);
  bool repro = again.pattern_hits == counts.pattern_hits;

  Outcome o;
  o.pass = stat_ok && repro;
  o.detail = "estimate " + num(est.estimate, "%.5f") + " vs 16/17 = " +
             num(truth, "%.5f") + " (|dev| = " +
             num(std::abs(est.estimate - truth) / est.std_error, "%.2f") +
             " SE), rerun hits " + (repro ? "identical" : "DIFFER");
  return o;
}

// --------------------------------------------------------------------------
// 9. The four figure datasets generate cleanly and the per-curve maxima of
//    the two family plots decrease strictly with the target size.

int run_figures(const std::string& which, const fs::path& out) {
  std::string cmd = std::string("\"") + QOVERLAP_BIN + "\" figures " + which +
                    " --deterministic -o " + out.string();
  int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

std::vector<double> column_maxima(const fs::path& csv, int columns) {
  std::vector<double> maxima(columns, -1e300);
  std::ifstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');  // the abscissa
    for (int c = 0; c < columns; ++c) {
      if (!std::getline(fields, field, ',')) return {};
      // Not stod: the deep tails underflow to subnormals, which stod rejects.
      maxima[c] = std::max(maxima[c], std::strtod(field.c_str(), nullptr));
    }
  }
  return header_seen ? maxima : std::vector<double>{};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return !v.empty();
}

Outcome criterion_9() {
  fs::create_directories("acceptance_scratch");
  bool all_ok = true;
  for (const char* which : {"fig2", "fig3", "fig4", "fig6"}) {
    int rc = run_figures(which, fs::path("acceptance_scratch") /
                                    (std::string(which) + ".csv"));
    all_ok = all_ok && rc == 0;
  }
  std::vector<double> fam2 = column_maxima("acceptance_scratch/fig2.csv", 8);
  std::vector<double> fam6 = column_maxima("acceptance_scratch/fig6.csv", 8);
  bool dec2 = strictly_decreasing(fam2);
  bool dec6 = strictly_decreasing(fam6);

  Outcome o;
  o.pass = all_ok && dec2 && dec6;
  o.detail = std::string("all four datasets ") +
             (all_ok ? "generated" : "FAILED") + ", curve maxima " +
             (dec2 && dec6 ? "strictly decreasing" : "OUT OF ORDER") +
             " (top " + num(fam2.empty() ? 0.0 : fam2[0]) + " / " +
             num(fam6.empty() ? 0.0 : fam6[0]) + ")";
  return o;
}

}  // namespace

int main() {
  struct Row {
    int id;
    const char* label;
    Outcome (*fn)();
    double budget_s;  // 0 = no runtime requirement
  };
  const Row rows[] = {
      {1, "phase-superposition efficiency optimum on a 1e-3 grid",
       &criterion_1, 1.0},
      {2, "trigonometric-phase efficiency band and optimum formula",
       &criterion_2, 5.0},
      {3, "cat approximant overlap: closed form vs state vectors",
       &criterion_3, 10.0},
      {4, "overlap identity on random mixed states, merged vs split designs",
       &criterion_4, 30.0},
      {5, "stage and cascade agreement with the two-mode oracle",
       &criterion_5, 60.0},
      {6, "closed-form algebra cross-checks", &criterion_6, 0.0},
      {7, "vacuum phase distributions and their normalization", &criterion_7,
       0.0},
      {8, "million-shot sampling accuracy and reproducibility", &criterion_8,
       60.0},
      {9, "figure datasets with ordered curve maxima", &criterion_9, 30.0},
  };

  int failures = 0;
  for (const Row& row : rows) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = row.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    bool in_budget = row.budget_s <= 0.0 || dt < row.budget_s;
    bool pass = o.pass && in_budget;
    std::string timing = num(dt, "%.2f") + " s";
    if (row.budget_s > 0.0) {
      timing += std::string(in_budget ? " < " : " OVER ") +
                num(row.budget_s, "%g") + " s";
    }
    std::printf("[%s] criterion %d: %s (%s; %s)\n", pass ? "PASS" : "FAIL",
                row.id, row.label, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (failures != 0) {
    std::printf("%d of 9 criteria failed\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
