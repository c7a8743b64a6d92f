#include "tdns/levels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace tdns {

std::vector<double> level_weights(int num_levels, double lambda, bool complete) {
  assert(num_levels >= 1);
  std::vector<double> w(static_cast<std::size_t>(num_levels));
  if (complete || num_levels == 1) {
    std::fill(w.begin(), w.end(), 1.0 / num_levels);
    return w;
  }
  const int j_max = num_levels - 1;
  double total = 0.0;
  for (int j = 0; j < num_levels; ++j) {
    w[j] = std::exp((j - j_max) / lambda);
    total += w[j];
  }
  for (auto& wj : w) wj /= total;
  return w;
}

LikelihoodValue create_level(std::vector<LikelihoodValue>& buffer) {
  assert(!buffer.empty());
  std::sort(buffer.begin(), buffer.end(),
            [](const LikelihoodValue& a, const LikelihoodValue& b) { return a < b; });
  const double quantile = 1.0 - std::exp(-1.0);
  std::size_t idx = static_cast<std::size_t>(quantile * static_cast<double>(buffer.size()));
  if (idx >= buffer.size()) idx = buffer.size() - 1;
  const LikelihoodValue threshold = buffer[idx];
  std::erase_if(buffer, [&](const LikelihoodValue& v) { return !(v > threshold); });
  return threshold;
}

void refine_log_x(std::vector<Level>& levels) {
  assert(!levels.empty());
  constexpr double regularizer = 100.0;
  const double nominal = std::exp(-1.0);
  levels[0].log_x = 0.0;
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double num = static_cast<double>(levels[j].exceeds) + regularizer * nominal;
    const double den = static_cast<double>(levels[j].visits) + regularizer;
    levels[j + 1].log_x = levels[j].log_x + std::log(num / den);
  }
}

double index_move_log_ratio(int j, int j_new, const std::vector<Level>& levels,
                            const std::vector<double>& weights, double beta) {
  double log_ratio = std::log(weights[j_new] / weights[j]) +
                     (levels[j].log_x - levels[j_new].log_x);
  if (beta > 0.0) {
    constexpr double c1 = 1000.0;
    log_ratio += beta * (std::log(static_cast<double>(levels[j].visits) + c1) -
                         std::log(static_cast<double>(levels[j_new].visits) + c1));
  }
  return log_ratio;
}

int index_move(int j, const LikelihoodValue& value, const std::vector<Level>& levels,
               const std::vector<double>& weights, double beta, Rng& rng) {
  const int top = static_cast<int>(levels.size()) - 1;
  if (top == 0) return 0;
  const int j_new = heavy_step_integer(j, top, rng);
  if (j_new == j) return j;
  if (!(value > levels[j_new].threshold)) return j;
  const double log_ratio = index_move_log_ratio(j, j_new, levels, weights, beta);
  if (log_ratio >= 0.0) return j_new;
  const double u = rng.rand();
  if (u > 0.0 && std::log(u) < log_ratio) return j_new;
  if (u == 0.0) return j_new;
  return j;
}

}  // namespace tdns
