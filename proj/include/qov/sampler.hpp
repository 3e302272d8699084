#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qov/fock.hpp"
#include "qov/scheme.hpp"

namespace qov {

// One Philox4x32-10 block: counter-based, stateless, splittable.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Uniform double in [0,1) keyed by (seed, shot, draw): 53 bits from one
// Philox block. Independent of batching/threading by construction.
double philox_uniform(std::uint64_t seed, std::uint64_t shot,
                      std::uint32_t draw);

struct SampleOptions {
  // Abort a shot at the first stage whose outcome misses the required clicks
  // (fast path). The full path keeps sampling every stage and the final
  // detector; pattern_hits is identical either way because both paths consume
  // the same (shot, draw) randomness.
  bool early_abort = true;
  // Record per-detector outcome histograms; forces the full path, serial.
  bool record_marginals = false;
  int threads = 1;
  // Shots per work batch; results do not depend on it (counter-based RNG).
  int batch_size = 65536;
};

struct EventCounts {
  std::uint64_t shots = 0;
  std::uint64_t pattern_hits = 0;
  std::uint64_t seed = 0;
  std::string rng_name = "philox4x32-10";
  // One histogram per stage detector plus one for the final detector; bin m
  // counts outcome m, the extra last bin counts truncation overflow.
  std::vector<std::vector<std::uint64_t>> marginals;
  bool marginals_recorded = false;
};

// Combine tallies from disjoint shot ranges (associative).
EventCounts merge_counts(const EventCounts& a, const EventCounts& b);

// Simulate `shots` runs of the cascade on rho_in. Per-stage outcome
// distributions come from the two-mode conditional maps; the accepting path
// is precomputed, off-path conditional states are built on demand and
// memoized (full path only). Shot s, stage i consumes philox_uniform(seed, s,
// i); the final detector consumes draw index = stage count.
EventCounts sample_cascade(const FockOperator& rho_in, const Scheme& scheme,
                           std::uint64_t shots, std::uint64_t seed,
                           const SampleOptions& opts = {});

struct OverlapEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double efficiency = 0.0;
  bool no_hits = false;      // zero-hit runs report estimate 0 with this flag
  double upper_bound_95 = 0.0;  // rule-of-three bound 3/(shots * efficiency)
};

// (hits/shots)/efficiency with the binomial standard error scaled the same
// way.
OverlapEstimate estimate_overlap(const EventCounts& counts, double efficiency);

}  // namespace qov
