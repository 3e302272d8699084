#include "qov/scheme_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

namespace qov {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json scheme_to_json(const Scheme& scheme, int cutoff) {
  ordered_json j;
  j["cutoff"] = cutoff;
  j["t_re"] = scheme.bs.t.real();
  j["t_im"] = scheme.bs.t.imag();
  j["r_re"] = scheme.bs.r.real();
  j["r_im"] = scheme.bs.r.imag();
  j["stages"] = ordered_json::array();
  for (const Stage& st : scheme.stages) {
    j["stages"].push_back({{"alpha_re", st.alpha.real()},
                           {"alpha_im", st.alpha.imag()},
                           {"clicks", st.clicks}});
  }
  return j;
}

std::pair<Scheme, int> scheme_from_json(const json& j) {
  BeamSplitter bs(Complex(j.at("t_re").get<double>(), j.at("t_im").get<double>()),
                  Complex(j.at("r_re").get<double>(), j.at("r_im").get<double>()));
  Scheme scheme{bs, {}, true};
  for (const json& st : j.at("stages")) {
    scheme.stages.push_back(
        {Complex(st.at("alpha_re").get<double>(), st.at("alpha_im").get<double>()),
         st.at("clicks").get<int>()});
  }
  int cutoff = j.at("cutoff").get<int>();
  if (cutoff < 2) throw std::invalid_argument("scheme cutoff must be >= 2");
  return {std::move(scheme), cutoff};
}

void write_scheme_file(const std::string& path, const Scheme& scheme,
                       int cutoff) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << scheme_to_json(scheme, cutoff).dump(2) << "\n";
}

std::pair<Scheme, int> read_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  in >> j;
  return scheme_from_json(j);
}

ordered_json design_report_to_json(const DesignReport& report) {
  ordered_json j;
  j["zeros"] = ordered_json::array();
  for (const RootCluster& c : report.zeros) {
    j["zeros"].push_back({{"re", c.value.real()},
                          {"im", c.value.imag()},
                          {"multiplicity", c.multiplicity}});
  }
  j["alphas"] = ordered_json::array();
  for (Complex a : report.alphas) {
    j["alphas"].push_back({{"re", a.real()}, {"im", a.imag()}});
  }
  j["efficiency_closed"] = report.efficiency_closed;
  j["efficiency_numeric"] = report.efficiency_numeric;
  j["root_residual"] = report.root_residual;
  j["verify_cutoff"] = report.verify_cutoff;
  return j;
}

ordered_json event_counts_to_json(const EventCounts& counts) {
  ordered_json j;
  j["shots"] = counts.shots;
  j["pattern_hits"] = counts.pattern_hits;
  j["seed"] = counts.seed;
  j["rng"] = counts.rng_name;
  if (counts.marginals_recorded) {
    j["marginals"] = counts.marginals;
  }
  return j;
}

FockOperator density_from_spec(const std::string& spec,
                               const FockSpace& space) {
  std::istringstream ss(spec);
  std::string kind;
  ss >> kind;
  auto need = [&](double& x, const char* what) {
    if (!(ss >> x)) {
      throw std::invalid_argument(std::string("state spec '") + spec +
                                  "' is missing " + what);
    }
  };

  if (kind == "vacuum") {
    FockVector v = fock_basis_state(space, 0);
    return {space, v.amp * v.amp.adjoint()};
  }
  if (kind == "fock") {
    double n = 0.0;
    need(n, "the photon number");
    FockVector v = fock_basis_state(space, int(n));
    return {space, v.amp * v.amp.adjoint()};
  }
  if (kind == "coherent") {
    double re = 0.0, im = 0.0;
    need(re, "Re(alpha)");
    need(im, "Im(alpha)");
    FockVector v = coherent_state(space, Complex(re, im));
    return {space, v.amp * v.amp.adjoint()};
  }
  if (kind == "superpos01") {
    double re = 0.0, im = 0.0;
    need(re, "Re(z)");
    need(im, "Im(z)");
    if (space.cutoff < 2) {
      throw std::invalid_argument("superpos01 needs cutoff >= 2");
    }
    CVec v = CVec::Zero(space.cutoff);
    Complex z(re, im);
    double norm = std::sqrt(1.0 + std::norm(z));
    v[0] = 1.0 / norm;
    v[1] = z / norm;
    return {space, v * v.adjoint()};
  }
  if (kind == "file") {
    std::string path;
    if (!(ss >> path)) {
      throw std::invalid_argument("state spec 'file' needs a path");
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json j;
    in >> j;
    int dim = j.at("dim").get<int>();
    const json& rows = j.at("rho");
    if (dim < 1 || int(rows.size()) != dim * dim) {
      throw std::invalid_argument("density file needs dim^2 row-major entries");
    }
    if (dim > space.cutoff) {
      throw std::invalid_argument("density file dimension exceeds the cutoff");
    }
    CMat m = CMat::Zero(space.cutoff, space.cutoff);
    for (int i = 0; i < dim; ++i) {
      for (int k = 0; k < dim; ++k) {
        const json& cell = rows[i * dim + k];
        m(i, k) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
      }
    }
    return {space, std::move(m)};
  }
  throw std::invalid_argument("unknown state spec '" + spec +
                              "' (vacuum | fock N | coherent RE IM | "
                              "superpos01 RE IM | file PATH)");
}

}  // namespace qov
