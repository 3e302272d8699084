#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qov/cat.hpp"
#include "qov/fock.hpp"
#include "qov/oracle.hpp"
#include "qov/phase.hpp"
#include "qov/sampler.hpp"
#include "qov/scheme.hpp"
#include "qov/scheme_io.hpp"

namespace {

using qov::BeamSplitter;
using qov::Complex;
using qov::FockSpace;
using qov::FockVector;
using qov::Scheme;
using nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr double kCrossCheckTol = 1e-6;  // closed vs numeric efficiency
constexpr int kCrossCheckMaxCutoff = 160;  // numeric route feasibility bound

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// 17 significant digits: enough to round-trip any double exactly.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CommonOpts {
  bool deterministic = false;
  std::string format = "auto";
  int threads = int(std::max(1u, std::thread::hardware_concurrency()));

  void attach(CLI::App& app) {
    app.add_flag("--deterministic", deterministic,
                 "suppress the timestamp field for byte-reproducible output");
    app.add_option("--format", format, "output format (auto picks per command)")
        ->check(CLI::IsMember({"auto", "csv", "json"}));
    app.add_option("--threads", threads, "worker pool size")
        ->check(CLI::PositiveNumber);
  }

  void require_format(const std::string& natural) const {
    if (format != "auto" && format != natural) {
      throw CLI::ValidationError("--format",
                                 "this command emits " + natural + " only");
    }
  }
};

void emit_json(const ordered_json& doc, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
  std::vector<std::string> target;
  double tsq = 0.5;
  bool merge = true;
  int cutoff = 0;  // 0: record the design's own verify cutoff
  std::string out = "scheme.json";
};

double token_to_double(const std::string& tok, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) {
    throw CLI::ValidationError("target", std::string("bad ") + what + " '" +
                                             tok + "'");
  }
  return v;
}

int token_to_int(const std::string& tok, const char* what) {
  double v = token_to_double(tok, what);
  int i = int(std::lround(v));
  if (double(i) != v) {
    throw CLI::ValidationError("target",
                               std::string(what) + " must be an integer");
  }
  return i;
}

void expect_tokens(const std::vector<std::string>& t, std::size_t lo,
                   std::size_t hi, const char* usage) {
  if (t.size() < lo || t.size() > hi) {
    throw CLI::ValidationError("target", std::string("expected: ") + usage);
  }
}

int run_design(const DesignArgs& args, const CommonOpts& common) {
  common.require_format("json");
  BeamSplitter bs = BeamSplitter::from_transmittance(args.tsq);
  const std::string kind = args.target.empty() ? "" : args.target[0];

  std::pair<Scheme, qov::DesignReport> designed = [&] {
    if (kind == "london") {
      expect_tokens(args.target, 3, 3, "london N phi");
      int n = token_to_int(args.target[1], "N");
      double phi = token_to_double(args.target[2], "phi");
      FockSpace space(n + 1);
      return qov::design_scheme(qov::london_phase_state(space, n, phi), bs,
                                args.merge);
    }
    if (kind == "trig") {
      expect_tokens(args.target, 4, 4, "trig N phi chi");
      int n = token_to_int(args.target[1], "N");
      double phi = token_to_double(args.target[2], "phi");
      double chi = token_to_double(args.target[3], "chi");
      FockSpace space(n + 1);
      return qov::design_scheme(
          qov::trig_phase_state(space, {phi, chi, n}), bs, args.merge);
    }
    if (kind == "cat") {
      expect_tokens(args.target, 3, 4, "cat n beta_re [beta_im]");
      int n = token_to_int(args.target[1], "n");
      Complex beta(token_to_double(args.target[2], "beta_re"),
                   args.target.size() > 3
                       ? token_to_double(args.target[3], "beta_im")
                       : 0.0);
      if (args.merge) return qov::cat_scheme(n, beta, bs);
      FockSpace space(2 * n + 2);
      return qov::design_scheme(qov::cat_like_state(space, n, beta).first, bs,
                                false);
    }
    if (kind == "fock") {
      expect_tokens(args.target, 2, 2, "fock N");
      int n = token_to_int(args.target[1], "N");
      FockSpace space(n + 1);
      return qov::design_scheme(qov::fock_basis_state(space, n), bs,
                                args.merge);
    }
    if (kind == "amps") {
      expect_tokens(args.target, 3, 99, "amps re im [re im ...]");
      if ((args.target.size() - 1) % 2 != 0) {
        throw CLI::ValidationError("target",
                                   "amps needs re/im pairs per level");
      }
      int levels = int((args.target.size() - 1) / 2);
      qov::CVec v(levels);
      for (int i = 0; i < levels; ++i) {
        v[i] = Complex(token_to_double(args.target[1 + 2 * i], "amplitude"),
                       token_to_double(args.target[2 + 2 * i], "amplitude"));
      }
      FockSpace space(levels);
      return qov::design_scheme(FockVector(space, std::move(v)), bs,
                                args.merge);
    }
    throw CLI::ValidationError(
        "target", "expected london | trig | cat | fock | amps, got '" + kind +
                      "'");
  }();

  const Scheme& scheme = designed.first;
  const qov::DesignReport& report = designed.second;
  int cutoff = args.cutoff > 0 ? args.cutoff : report.verify_cutoff;
  qov::write_scheme_file(args.out, scheme, cutoff);

  ordered_json doc;
  doc["config"] = {{"command", "design"},
                   {"target", args.target},
                   {"tsq", args.tsq},
                   {"merge", args.merge},
                   {"cutoff", cutoff},
                   {"out", args.out},
                   {"threads", common.threads}};
  if (!common.deterministic) doc["timestamp"] = iso_timestamp();
  doc["scheme_file"] = args.out;
  doc["report"] = qov::design_report_to_json(report);
  emit_json(doc, "-");
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string scheme_file;
  std::string rho_spec = "vacuum";
  int cutoff = 0;
  std::string out;
};

int run_verify(const VerifyArgs& args, const CommonOpts& common) {
  common.require_format("json");
  auto [scheme, file_cutoff] = qov::read_scheme_file(args.scheme_file);
  int cutoff = args.cutoff > 0 ? args.cutoff : file_cutoff;
  FockSpace space(cutoff);
  qov::FockOperator rho = qov::density_from_spec(args.rho_spec, space);

  double p_cascade = qov::joint_event_probability(rho, scheme);
  double p_oracle = qov::cascade_probability_oracle(rho, scheme);
  double denom = std::max({std::abs(p_cascade), std::abs(p_oracle), 1e-300});
  double rel_diff = std::abs(p_cascade - p_oracle) / denom;
  double efficiency = qov::efficiency_numeric(space, scheme);
  double overlap = qov::overlap_from_probability(p_cascade, efficiency);

  bool ok = rel_diff <= 1e-6;
  ordered_json doc;
  doc["config"] = {{"command", "verify"},
                   {"scheme", args.scheme_file},
                   {"rho", args.rho_spec},
                   {"cutoff", cutoff},
                   {"threads", common.threads}};
  if (!common.deterministic) doc["timestamp"] = iso_timestamp();
  doc["probability_cascade"] = p_cascade;
  doc["probability_oracle"] = p_oracle;
  doc["relative_difference"] = rel_diff;
  doc["efficiency"] = efficiency;
  doc["overlap"] = overlap;
  doc["consistent"] = ok;
  emit_json(doc, args.out);
  if (!ok) {
    std::cerr << "verify: cascade and oracle probabilities differ by "
              << fmt(rel_diff) << " (relative)\n";
    return kExitVerification;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// figures

struct FigureArgs {
  std::string which;
  int grid = 120;
  std::string out;
};

struct CrossCheck {
  // Indices (row-major over emitted values) scheduled for the numeric route.
  std::vector<std::size_t> picks;
  std::size_t seen = 0;
  double worst = 0.0;

  static CrossCheck plan(std::size_t n_points) {
    CrossCheck c;
    std::size_t want = std::max<std::size_t>(1, n_points / 100);
    for (std::size_t i = 0; i < want; ++i) {
      c.picks.push_back((i * n_points) / want + n_points / (2 * want));
    }
    return c;
  }

  bool due(std::size_t index) const {
    return std::find(picks.begin(), picks.end(), index) != picks.end();
  }
};

// Numeric-route check of a closed-form efficiency; returns false (skipping)
// when the working cutoff the cascade would need is impractically large.
bool recheck_efficiency(const Scheme& scheme, int top_index, double closed,
                        double& worst) {
  int cutoff = 0;
  try {
    cutoff = qov::working_cutoff(scheme, top_index);
  } catch (const qov::Error&) {
    return true;  // amplitudes beyond any practical cutoff
  }
  if (cutoff > kCrossCheckMaxCutoff) return true;
  double numeric = qov::efficiency_numeric(FockSpace(cutoff), scheme);
  double diff = std::abs(numeric - closed);
  double rel = diff / std::max(closed, 1e-300);
  // The absolute floor ignores cancellation noise on efficiencies that have
  // underflowed to the rounding scale of the cascade matrices.
  if (diff <= 1e-14) return true;
  worst = std::max(worst, rel);
  return rel <= kCrossCheckTol;
}

void csv_header(std::ostream& out, const FigureArgs& args,
                const CommonOpts& common) {
  out << "# command=figures which=" << args.which << " grid=" << args.grid
      << " threads=" << common.threads << "\n";
  if (!common.deterministic) out << "# timestamp=" << iso_timestamp() << "\n";
}

int emit_london_family_csv(std::ostream& out, const FigureArgs& args,
                           const CommonOpts& common) {
  constexpr int kMaxN = 8;
  // Zeros of each truncated phase state at phi = 0; T-independent.
  std::vector<std::vector<Complex>> zeros(kMaxN + 1);
  std::vector<FockVector> targets;
  targets.reserve(kMaxN + 1);
  FockSpace space(kMaxN + 1);
  for (int n = 1; n <= kMaxN; ++n) {
    targets.push_back(qov::london_phase_state(space, n, 0.0));
    zeros[n] = qov::zeros_of_state(targets.back());
  }

  std::vector<double> t_grid = qov::midpoint_grid(0.0, 1.0, args.grid);
  CrossCheck check = CrossCheck::plan(t_grid.size() * kMaxN);
  csv_header(out, args, common);
  out << "Tabs";
  for (int n = 1; n <= kMaxN; ++n) out << ",eff_N" << n;
  out << "\n";

  std::size_t index = 0;
  for (double t_abs : t_grid) {
    BeamSplitter bs = BeamSplitter::from_transmittance(t_abs * t_abs);
    out << fmt(t_abs);
    for (int n = 1; n <= kMaxN; ++n, ++index) {
      std::vector<Complex> alphas = qov::alphas_from_zeros(zeros[n], bs);
      double eff = qov::efficiency_closed_form(targets[n - 1], bs, alphas);
      out << "," << fmt(eff);
      if (check.due(index)) {
        Scheme scheme{bs, {}, true};
        for (Complex a : alphas) scheme.stages.push_back({a, 1});
        if (!recheck_efficiency(scheme, n, eff, check.worst)) {
          std::cerr << "figures: closed-form efficiency off by "
                    << fmt(check.worst) << " at |T|=" << fmt(t_abs)
                    << " N=" << n << "\n";
          return kExitVerification;
        }
      }
    }
    out << "\n";
  }
  return 0;
}

int emit_trig_surface_csv(std::ostream& out, const FigureArgs& args,
                          const CommonOpts& common) {
  std::vector<double> phi_grid = qov::midpoint_grid(0.0, M_PI, args.grid);
  std::vector<double> t_grid = qov::midpoint_grid(0.0, 1.0, args.grid);
  CrossCheck check = CrossCheck::plan(phi_grid.size() * t_grid.size());
  csv_header(out, args, common);
  out << "phi,Tabs,eff\n";
  std::size_t index = 0;
  for (double phi : phi_grid) {
    bool degenerate =
        std::abs(std::cos(phi)) < 1e-9 || std::abs(std::sin(2.0 * phi)) < 1e-9;
    for (double t_abs : t_grid) {
      BeamSplitter bs = BeamSplitter::from_transmittance(t_abs * t_abs);
      // At cos(phi) = 0 the stage amplitude diverges and the efficiency
      // tends to zero at any fixed T; emit that limit.
      double eff = degenerate ? 0.0 : qov::trig_efficiency(phi, bs);
      out << fmt(phi) << "," << fmt(t_abs) << "," << fmt(eff) << "\n";
      if (!degenerate && check.due(index)) {
        Scheme scheme = qov::trig_phase_scheme({phi, 0.0, 1}, bs);
        if (!recheck_efficiency(scheme, 1, eff, check.worst)) {
          std::cerr << "figures: closed-form efficiency off by "
                    << fmt(check.worst) << " at phi=" << fmt(phi)
                    << " |T|=" << fmt(t_abs) << "\n";
          return kExitVerification;
        }
      }
      ++index;
    }
  }
  return 0;
}

int emit_trig_optimum_csv(std::ostream& out, const FigureArgs& args,
                          const CommonOpts& common) {
  std::vector<double> phi_grid = qov::midpoint_grid(0.0, M_PI, args.grid);
  CrossCheck check = CrossCheck::plan(phi_grid.size());
  csv_header(out, args, common);
  out << "phi,Tsq_opt,eff_max\n";
  std::size_t index = 0;
  for (double phi : phi_grid) {
    double tsq_opt, eff;
    if (std::abs(std::cos(phi)) < 1e-9) {
      // cos(phi) -> 0 limit: optimal transmittance tends to 1 and the
      // maximal efficiency to 1/e.
      tsq_opt = 1.0;
      eff = std::exp(-1.0);
    } else {
      tsq_opt = qov::optimal_transmittance(phi);
      BeamSplitter bs = BeamSplitter::from_transmittance(tsq_opt);
      eff = qov::trig_efficiency(phi, bs);
      if (check.due(index)) {
        Scheme scheme = qov::trig_phase_scheme({phi, 0.0, 1}, bs);
        if (!recheck_efficiency(scheme, 1, eff, check.worst)) {
          std::cerr << "figures: closed-form efficiency off by "
                    << fmt(check.worst) << " at phi=" << fmt(phi) << "\n";
          return kExitVerification;
        }
      }
    }
    out << fmt(phi) << "," << fmt(tsq_opt) << "," << fmt(eff) << "\n";
    ++index;
  }
  return 0;
}

int emit_cat_family_csv(std::ostream& out, const FigureArgs& args,
                        const CommonOpts& common) {
  constexpr int kMaxN = 8;
  constexpr int kMaxCheckN = 6;  // numeric route needs a tractable design
  std::vector<double> t_grid = qov::midpoint_grid(0.0, 1.0, args.grid);
  CrossCheck check = CrossCheck::plan(t_grid.size() * kMaxCheckN);
  csv_header(out, args, common);
  out << "Tabs";
  for (int n = 1; n <= kMaxN; ++n) out << ",eff_n" << n;
  out << "\n";

  std::size_t index = 0;
  for (double t_abs : t_grid) {
    BeamSplitter bs = BeamSplitter::from_transmittance(t_abs * t_abs);
    out << fmt(t_abs);
    for (int n = 1; n <= kMaxN; ++n) {
      Complex beta(std::sqrt(double(n)), 0.0);
      double eff = qov::cat_efficiency_closed_form(n, beta, bs);
      out << "," << fmt(eff);
      if (n <= kMaxCheckN) {
        if (check.due(index)) {
          std::vector<Complex> alphas =
              qov::alphas_from_zeros({beta, -beta}, bs);
          Scheme scheme{bs, {{alphas[0], n}, {alphas[1], n}}, true};
          if (!recheck_efficiency(scheme, 2 * n, eff, check.worst)) {
            std::cerr << "figures: closed-form efficiency off by "
                      << fmt(check.worst) << " at |T|=" << fmt(t_abs)
                      << " n=" << n << "\n";
            return kExitVerification;
          }
        }
        ++index;
      }
    }
    out << "\n";
  }
  return 0;
}

int run_figures(const FigureArgs& args, const CommonOpts& common) {
  common.require_format("csv");
  std::ostringstream buffer;
  int rc;
  if (args.which == "fig2") {
    rc = emit_london_family_csv(buffer, args, common);
  } else if (args.which == "fig3") {
    rc = emit_trig_surface_csv(buffer, args, common);
  } else if (args.which == "fig4") {
    rc = emit_trig_optimum_csv(buffer, args, common);
  } else if (args.which == "fig6") {
    rc = emit_cat_family_csv(buffer, args, common);
  } else {
    throw CLI::ValidationError("which",
                               "expected fig2 | fig3 | fig4 | fig6");
  }
  if (rc != 0) return rc;
  if (args.out.empty() || args.out == "-") {
    std::cout << buffer.str();
  } else {
    std::ofstream out(args.out, std::ios::binary);  // LF line endings
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << buffer.str();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::string scheme_file;
  std::string rho_spec = "vacuum";
  std::uint64_t shots = 100000;
  std::uint64_t seed = 1;
  bool marginals = false;
  int cutoff = 0;
  std::string out;
};

int run_sample(const SampleArgs& args, const CommonOpts& common) {
  common.require_format("json");
  auto [scheme, file_cutoff] = qov::read_scheme_file(args.scheme_file);
  int cutoff = args.cutoff > 0 ? args.cutoff : file_cutoff;
  FockSpace space(cutoff);
  qov::FockOperator rho = qov::density_from_spec(args.rho_spec, space);

  qov::SampleOptions opts;
  opts.record_marginals = args.marginals;
  opts.early_abort = !args.marginals;
  opts.threads = common.threads;
  qov::EventCounts counts =
      qov::sample_cascade(rho, scheme, args.shots, args.seed, opts);
  double efficiency = qov::efficiency_numeric(space, scheme);
  qov::OverlapEstimate est = qov::estimate_overlap(counts, efficiency);

  ordered_json doc;
  doc["config"] = {{"command", "sample"},   {"scheme", args.scheme_file},
                   {"rho", args.rho_spec},  {"shots", args.shots},
                   {"seed", args.seed},     {"marginals", args.marginals},
                   {"cutoff", cutoff},      {"threads", common.threads},
                   {"batch_size", opts.batch_size}};
  if (!common.deterministic) doc["timestamp"] = iso_timestamp();
  doc["counts"] = qov::event_counts_to_json(counts);
  doc["estimate"] = {{"overlap", est.estimate},
                     {"std_error", est.std_error},
                     {"efficiency", est.efficiency},
                     {"no_hits", est.no_hits},
                     {"upper_bound_95", est.upper_bound_95}};
  emit_json(doc, args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design, verify, simulate and sample beam-splitter-cascade "
               "overlap measurements"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "read defaults from a TOML/INI file");
  CommonOpts common;
  common.attach(app);

  DesignArgs design;
  CLI::App* cmd_design = app.add_subcommand(
      "design", "design the cascade projecting on a target state");
  cmd_design
      ->add_option("target", design.target,
                   "london N phi | trig N phi chi | cat n beta_re [beta_im] | "
                   "fock N | amps re im [re im ...]")
      ->required()
      ->expected(-1);
  cmd_design->add_option("--tsq", design.tsq, "beam splitter |T|^2 in (0,1)");
  cmd_design->add_flag("--merge,!--no-merge", design.merge,
                       "merge repeated zeros into multi-click stages");
  cmd_design->add_option("--cutoff", design.cutoff,
                         "override the cutoff recorded in the scheme file");
  cmd_design->add_option("-o,--out", design.out, "scheme file path");

  VerifyArgs verify;
  CLI::App* cmd_verify = app.add_subcommand(
      "verify", "cross-check a scheme file against the two-mode oracle");
  cmd_verify->add_option("scheme", verify.scheme_file, "scheme JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_verify->add_option("--rho", verify.rho_spec,
                         "vacuum | fock N | coherent RE IM | superpos01 RE IM "
                         "| file PATH");
  cmd_verify->add_option("--cutoff", verify.cutoff, "override the cutoff");
  cmd_verify->add_option("-o,--out", verify.out, "report path (default stdout)");

  FigureArgs figures;
  CLI::App* cmd_figures =
      app.add_subcommand("figures", "emit efficiency-curve CSV data");
  cmd_figures->add_option("which", figures.which, "fig2 | fig3 | fig4 | fig6")
      ->required();
  cmd_figures->add_option("--grid", figures.grid, "points per axis")
      ->check(CLI::PositiveNumber);
  cmd_figures->add_option("-o,--out", figures.out, "CSV path (default stdout)");

  SampleArgs sample;
  CLI::App* cmd_sample = app.add_subcommand(
      "sample", "Monte Carlo detection run on a scheme file");
  cmd_sample->add_option("scheme", sample.scheme_file, "scheme JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd_sample->add_option("--rho", sample.rho_spec, "input state spec");
  cmd_sample->add_option("--shots", sample.shots, "number of shots");
  cmd_sample->add_option("--seed", sample.seed, "RNG seed");
  cmd_sample->add_flag("--marginals", sample.marginals,
                       "record per-detector outcome histograms (serial)");
  cmd_sample->add_option("--cutoff", sample.cutoff, "override the cutoff");
  cmd_sample->add_option("-o,--out", sample.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (*cmd_design) return run_design(design, common);
    if (*cmd_verify) return run_verify(verify, common);
    if (*cmd_figures) return run_figures(figures, common);
    if (*cmd_sample) return run_sample(sample, common);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const qov::DesignVerificationFailed& e) {
    std::cerr << "design verification failed: " << e.what()
              << " (achieved fidelity " << fmt(e.achieved_fidelity) << ")\n";
    return kExitVerification;
  } catch (const qov::InconsistentProbability& e) {
    std::cerr << "inconsistent probability: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
