#pragma once

#include <cstdint>
#include <vector>

#include "tdns/likelihood_value.hpp"
#include "tdns/rng.hpp"

namespace tdns {

// A likelihood threshold with its running estimate of enclosed prior mass and
// traffic counters. Level 0 has threshold (-inf, 0) and log_x = 0 (the whole
// prior); each subsequent level encloses roughly e^-1 of the mass above the
// previous one.
struct Level {
  LikelihoodValue threshold;
  double log_x = 0.0;
  std::uint64_t visits = 0;   // counted only while the next level exists
  std::uint64_t exceeds = 0;  // visits whose value beat the next threshold
  std::uint64_t accepts = 0;  // particle-move statistics at this level
  std::uint64_t tries = 0;
};

inline Level make_level_zero() { return Level{}; }

// Mixture weights over levels. While levels are still being created the
// weights follow an exponential backbone exp((j - j_max)/lambda) favouring
// the top; once the target number exists they switch to uniform.
std::vector<double> level_weights(int num_levels, double lambda, bool complete);

// Select the new threshold as the (1 - e^-1) empirical quantile of the
// buffer (floor indexing under the total order) and prune the buffer to
// entries strictly above it. Requires a non-empty buffer.
LikelihoodValue create_level(std::vector<LikelihoodValue>& buffer);

// Recompute every log_x from the traffic counters:
//   log_x[j+1] = log_x[j] + log((exceeds_j + C e^-1) / (visits_j + C)),
// with regularizer C = 100 pseudo-counts at the nominal e^-1 ratio. The ratio
// is always < 1, so log_x stays strictly decreasing.
void refine_log_x(std::vector<Level>& levels);

// Log acceptance ratio for an index move j -> j_new at fixed particle value
// (the hard constraint is checked separately):
//   log(w[j_new]/w[j]) + log_x[j] - log_x[j_new] + beta-term,
// where the beta term [(visits_j + C1)/(visits_j_new + C1)]^beta (C1 = 1000)
// pushes traffic toward under-visited levels while levels are being built.
double index_move_log_ratio(int j, int j_new, const std::vector<Level>& levels,
                            const std::vector<double>& weights, double beta);

// One Metropolis move of the level index: propose with the heavy-tailed
// discrete kernel, reject outright if the particle value does not satisfy
// the proposed threshold, otherwise accept with the ratio above.
int index_move(int j, const LikelihoodValue& value, const std::vector<Level>& levels,
               const std::vector<double>& weights, double beta, Rng& rng);

}  // namespace tdns
