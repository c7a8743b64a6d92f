#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "tdns/rng.hpp"

namespace tdns {

struct BenchReport {
  double seconds_cached = 0.0;
  double seconds_uncached = 0.0;
  std::uint64_t accepts_cached = 0;
  std::uint64_t accepts_uncached = 0;
  bool identical_sequences = false;

  double ratio() const {
    return seconds_cached > 0.0 ? seconds_uncached / seconds_cached : 0.0;
  }
};

// Fixed constrained-Metropolis workload for timing the incremental-cache
// speedup: starting from a prior draw, proposals are accepted when they beat
// the initial likelihood, so the chain wanders upward through realistic
// states. Both passes consume identical random streams; since the likelihood
// values agree to rounding, the accept/reject sequences must match.
template <class M>
BenchReport run_bench(M model_cached, M model_uncached, std::uint64_t seed, int steps) {
  using clock = std::chrono::steady_clock;

  auto chain = [&](const M& model, std::vector<unsigned char>& decisions,
                   std::uint64_t& accepts) {
    Rng rng(seed);
    auto state = model.from_prior(rng);
    const double threshold = model.log_likelihood(state);
    decisions.reserve(steps);
    const auto start = clock::now();
    for (int i = 0; i < steps; ++i) {
      auto trial = state;
      const double logh = model.perturb(trial, rng);
      const double log_l = model.log_likelihood(trial);
      const double u = rng.rand();
      bool accept = log_l > threshold;
      if (accept && logh < 0.0) accept = (u == 0.0) || (std::log(u) < logh);
      decisions.push_back(accept ? 1 : 0);
      if (accept) {
        state = std::move(trial);
        ++accepts;
      }
    }
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  BenchReport report;
  std::vector<unsigned char> cached_decisions, uncached_decisions;
  report.seconds_cached = chain(model_cached, cached_decisions, report.accepts_cached);
  report.seconds_uncached = chain(model_uncached, uncached_decisions, report.accepts_uncached);
  report.identical_sequences = cached_decisions == uncached_decisions;
  return report;
}

}  // namespace tdns
