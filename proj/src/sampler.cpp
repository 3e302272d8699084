#include "qov/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "qov/oracle.hpp"

namespace qov {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u, kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u, kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(kMul0) * counter[0];
    std::uint64_t p1 = std::uint64_t(kMul1) * counter[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

double philox_uniform(std::uint64_t seed, std::uint64_t shot,
                      std::uint32_t draw) {
  std::array<std::uint32_t, 4> counter{std::uint32_t(shot),
                                       std::uint32_t(shot >> 32), draw, 0u};
  std::array<std::uint32_t, 2> key{std::uint32_t(seed),
                                   std::uint32_t(seed >> 32)};
  auto out = philox4x32(counter, key);
  std::uint64_t hi = out[0] >> 5;  // 27 bits
  std::uint64_t lo = out[1] >> 6;  // 26 bits
  return double((hi << 26) | lo) * 0x1.0p-53;
}

namespace {

struct StageKit {
  std::vector<CMat> kraus;  // conditional map per ancilla outcome
  std::vector<CMat> povm;   // kraus^dag kraus
};

// Inverse-CDF draw; dist.size() is the truncation-overflow outcome.
int draw_outcome(const std::vector<double>& dist, double u) {
  double acc = 0.0;
  for (std::size_t m = 0; m < dist.size(); ++m) {
    acc += dist[m];
    if (u < acc) return int(m);
  }
  return int(dist.size());
}

std::vector<double> stage_distribution(const StageKit& kit, const CMat& rho) {
  std::vector<double> dist(kit.povm.size());
  for (std::size_t m = 0; m < kit.povm.size(); ++m) {
    Complex tr = kit.povm[m].cwiseProduct(rho.transpose()).sum();
    dist[m] = std::max(tr.real(), 0.0);
  }
  return dist;
}

std::vector<double> final_distribution(const CMat& rho) {
  std::vector<double> dist(rho.rows());
  for (int n = 0; n < rho.rows(); ++n) {
    dist[n] = std::max(rho(n, n).real(), 0.0);
  }
  return dist;
}

// Everything precomputed once per sampling run: the per-stage conditional
// maps and the outcome tables along the all-detectors-match path. Both
// sampling modes read the same tables, so the hit decisions agree bitwise.
struct CascadeTables {
  int cutoff = 0;
  std::vector<int> required;                     // clicks per stage
  bool final_zero = true;
  std::vector<StageKit> kits;
  CMat rho0;
  std::vector<CMat> accept_rho;                  // state before each stage
  std::vector<std::vector<double>> accept_dist;  // outcome dist at each stage
  std::vector<double> accept_final;              // final-detector dist
  int dead_stage = -1;  // first stage the accepting path cannot pass
};

CascadeTables build_tables(const FockOperator& rho_in, const Scheme& scheme) {
  validate_density_operator(rho_in, 1e-9);
  double alpha_reach = 0.0;
  for (const Stage& st : scheme.stages) alpha_reach += std::abs(st.alpha);

  CascadeTables tab;
  tab.cutoff =
      rho_in.space.cutoff + cutoff_for_amplitude(alpha_reach, 1e-12, 1) + 8;
  tab.final_zero = scheme.final_zero;
  FockSpace work(tab.cutoff);
  tab.rho0 = embed(rho_in, work).matrix;

  for (const Stage& st : scheme.stages) {
    tab.required.push_back(st.clicks);
    StageKit kit;
    for (FockOperator& op :
         conditional_stage_family(work, scheme.bs, st.alpha)) {
      kit.povm.push_back(op.matrix.adjoint() * op.matrix);
      kit.kraus.push_back(std::move(op.matrix));
    }
    tab.kits.push_back(std::move(kit));
  }

  CMat rho = tab.rho0;
  for (std::size_t i = 0; i < tab.kits.size(); ++i) {
    tab.accept_rho.push_back(rho);
    tab.accept_dist.push_back(stage_distribution(tab.kits[i], rho));
    double p = tab.accept_dist[i][tab.required[i]];
    if (p <= 0.0) {
      tab.dead_stage = int(i);
      break;
    }
    const CMat& a = tab.kits[i].kraus[tab.required[i]];
    rho = (a * rho * a.adjoint()) / p;
  }
  if (tab.dead_stage < 0) tab.accept_final = final_distribution(rho);
  return tab;
}

EventCounts empty_counts(const CascadeTables& tab, std::uint64_t seed,
                         bool marginals) {
  EventCounts c;
  c.seed = seed;
  c.marginals_recorded = marginals;
  if (marginals) {
    for (const StageKit& kit : tab.kits) {
      c.marginals.emplace_back(kit.povm.size() + 1, 0);
    }
    c.marginals.emplace_back(tab.cutoff + 1, 0);
  }
  return c;
}

void run_abort(const CascadeTables& tab, std::uint64_t seed,
               std::uint64_t begin, std::uint64_t end, EventCounts& out) {
  const std::uint32_t final_draw = std::uint32_t(tab.kits.size());
  for (std::uint64_t s = begin; s < end; ++s) {
    ++out.shots;
    bool ok = true;
    for (std::size_t i = 0; i < tab.kits.size(); ++i) {
      if (tab.dead_stage >= 0 && int(i) >= tab.dead_stage) {
        ok = false;  // accepting path has zero mass from here on
        break;
      }
      double u = philox_uniform(seed, s, std::uint32_t(i));
      if (draw_outcome(tab.accept_dist[i], u) != tab.required[i]) {
        ok = false;
        break;
      }
    }
    if (ok && tab.final_zero) {
      double u = philox_uniform(seed, s, final_draw);
      ok = draw_outcome(tab.accept_final, u) == 0;
    }
    if (ok) ++out.pattern_hits;
  }
}

// Conditional states for arbitrary outcome prefixes, grown on demand. The
// accepting-path prefixes are preloaded from the tables so the full path
// reproduces exactly the numbers the abort path uses.
struct PrefixMemo {
  struct Node {
    CMat rho;
    std::vector<double> dist;  // next-stage dist; final dist at depth M
  };
  static constexpr std::size_t kMaxNodes = 4096;
  const CascadeTables* tab;
  std::map<std::vector<int>, Node> nodes;

  explicit PrefixMemo(const CascadeTables& t) : tab(&t) {
    std::vector<int> prefix;
    for (std::size_t i = 0; i < t.accept_dist.size(); ++i) {
      nodes[prefix] = {t.accept_rho[i], t.accept_dist[i]};
      prefix.push_back(t.required[i]);
    }
    if (t.dead_stage < 0) {
      nodes[prefix] = {CMat(), t.accept_final};
    }
  }

  // dist for the stage at depth prefix.size(), or the final dist at depth M.
  const std::vector<double>& distribution(const std::vector<int>& prefix) {
    auto it = nodes.find(prefix);
    if (it != nodes.end()) return it->second.dist;
    Node node = make_node(prefix);
    if (nodes.size() >= kMaxNodes) {
      scratch_ = std::move(node.dist);
      return scratch_;
    }
    return nodes.emplace(prefix, std::move(node)).first->second.dist;
  }

 private:
  std::vector<double> scratch_;

  Node make_node(const std::vector<int>& prefix) {
    std::vector<int> parent(prefix.begin(), prefix.end() - 1);
    int outcome = prefix.back();
    std::size_t depth = parent.size();
    // Ensure the parent exists (recursion depth = stage count).
    distribution(parent);
    auto pit = nodes.find(parent);
    CMat rho;
    if (pit != nodes.end()) {
      const Node& pn = pit->second;
      double p = pn.dist[outcome];
      const CMat& a = tab->kits[depth].kraus[outcome];
      rho = (a * pn.rho * a.adjoint()) / std::max(p, 1e-300);
    } else {
      // Parent was not cached (memo full): rebuild from the root.
      rho = tab->rho0;
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        const StageKit& kit = tab->kits[i];
        double p = stage_distribution(kit, rho)[prefix[i]];
        const CMat& a = kit.kraus[prefix[i]];
        rho = (a * rho * a.adjoint()) / std::max(p, 1e-300);
      }
    }
    Node node;
    if (prefix.size() < tab->kits.size()) {
      node.dist = stage_distribution(tab->kits[prefix.size()], rho);
      node.rho = std::move(rho);
    } else {
      node.dist = final_distribution(rho);
    }
    return node;
  }
};

void run_full(const CascadeTables& tab, std::uint64_t seed,
              std::uint64_t begin, std::uint64_t end, PrefixMemo& memo,
              EventCounts& out) {
  const std::size_t n_stages = tab.kits.size();
  std::vector<int> prefix;
  for (std::uint64_t s = begin; s < end; ++s) {
    ++out.shots;
    prefix.clear();
    bool ok = true;
    for (std::size_t i = 0; i < n_stages; ++i) {
      double u = philox_uniform(seed, s, std::uint32_t(i));
      const std::vector<double>& dist = memo.distribution(prefix);
      int m = draw_outcome(dist, u);
      if (out.marginals_recorded) {
        auto& hist = out.marginals[i];
        ++hist[std::min<std::size_t>(m, hist.size() - 1)];
      }
      ok = ok && m == tab.required[i];
      // Overflow outcomes have no conditional map; pin them to the last one.
      prefix.push_back(std::min<int>(m, int(dist.size()) - 1));
    }
    if (tab.final_zero) {
      double u = philox_uniform(seed, s, std::uint32_t(n_stages));
      int m = draw_outcome(memo.distribution(prefix), u);
      if (out.marginals_recorded) {
        auto& hist = out.marginals.back();
        ++hist[std::min<std::size_t>(m, hist.size() - 1)];
      }
      ok = ok && m == 0;
    }
    if (ok) ++out.pattern_hits;
  }
}

}  // namespace

EventCounts merge_counts(const EventCounts& a, const EventCounts& b) {
  if (a.rng_name != b.rng_name) {
    throw std::invalid_argument("cannot merge counts from different RNGs");
  }
  EventCounts out = a;
  out.shots += b.shots;
  out.pattern_hits += b.pattern_hits;
  out.marginals_recorded = a.marginals_recorded && b.marginals_recorded;
  if (out.marginals_recorded) {
    if (a.marginals.size() != b.marginals.size()) {
      throw std::invalid_argument("marginal histograms have different shapes");
    }
    for (std::size_t i = 0; i < out.marginals.size(); ++i) {
      if (a.marginals[i].size() != b.marginals[i].size()) {
        throw std::invalid_argument("marginal histograms have different shapes");
      }
      for (std::size_t j = 0; j < out.marginals[i].size(); ++j) {
        out.marginals[i][j] += b.marginals[i][j];
      }
    }
  } else {
    out.marginals.clear();
  }
  return out;
}

EventCounts sample_cascade(const FockOperator& rho_in, const Scheme& scheme,
                           std::uint64_t shots, std::uint64_t seed,
                           const SampleOptions& opts) {
  CascadeTables tab = build_tables(rho_in, scheme);
  bool full_path = opts.record_marginals || !opts.early_abort;

  if (full_path || opts.threads <= 1) {
    // Full path keeps one memo; run it serially.
    EventCounts out = empty_counts(tab, seed, opts.record_marginals);
    if (full_path) {
      PrefixMemo memo(tab);
      run_full(tab, seed, 0, shots, memo, out);
    } else {
      run_abort(tab, seed, 0, shots, out);
    }
    return out;
  }

  int n_threads = int(std::min<std::uint64_t>(std::uint64_t(opts.threads),
                                              std::max<std::uint64_t>(shots, 1)));
  std::uint64_t batch = std::max<std::uint64_t>(opts.batch_size, 1);
  std::atomic<std::uint64_t> next{0};
  std::vector<EventCounts> parts(n_threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      parts[t] = empty_counts(tab, seed, false);
      for (;;) {
        std::uint64_t begin = next.fetch_add(batch);
        if (begin >= shots) break;
        run_abort(tab, seed, begin, std::min(begin + batch, shots), parts[t]);
      }
    });
  }
  for (std::thread& th : pool) th.join();
  EventCounts out = parts[0];
  for (int t = 1; t < n_threads; ++t) out = merge_counts(out, parts[t]);
  return out;
}

OverlapEstimate estimate_overlap(const EventCounts& counts, double efficiency) {
  if (counts.shots == 0) throw std::invalid_argument("no shots recorded");
  if (!(efficiency > 0.0)) {
    throw std::invalid_argument("efficiency must be positive");
  }
  OverlapEstimate est;
  est.efficiency = efficiency;
  double shots = double(counts.shots);
  double phat = double(counts.pattern_hits) / shots;
  est.estimate = phat / efficiency;
  est.std_error = std::sqrt(phat * (1.0 - phat) / shots) / efficiency;
  est.no_hits = counts.pattern_hits == 0;
  est.upper_bound_95 = 3.0 / (shots * efficiency);
  return est;
}

}  // namespace qov
