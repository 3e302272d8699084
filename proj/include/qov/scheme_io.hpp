#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "qov/sampler.hpp"
#include "qov/scheme.hpp"

namespace qov {

// Scheme file layout: {cutoff, t_re, t_im, r_re, r_im,
//                      stages: [{alpha_re, alpha_im, clicks}, ...]}.
// `cutoff` is the working cutoff the design was verified at; verify/sample
// rebuild the cascade there.
nlohmann::ordered_json scheme_to_json(const Scheme& scheme, int cutoff);
std::pair<Scheme, int> scheme_from_json(const nlohmann::json& j);

void write_scheme_file(const std::string& path, const Scheme& scheme,
                       int cutoff);
std::pair<Scheme, int> read_scheme_file(const std::string& path);

nlohmann::ordered_json design_report_to_json(const DesignReport& report);
nlohmann::ordered_json event_counts_to_json(const EventCounts& counts);

// Density-operator mini-language used by the CLI:
//   "vacuum" | "fock N" | "coherent RE IM" | "superpos01 RE IM" | "file PATH"
// superpos01 is the normalized |0> + z|1| two-level state. "file" loads a
// JSON matrix {"rho": [[re, im], ...row-major...], "dim": d}.
FockOperator density_from_spec(const std::string& spec,
                               const FockSpace& space);

}  // namespace qov
