// Demonstration of why plain posterior MCMC struggles on the sinusoid
// problem: a Metropolis chain targeting the posterior directly gets stuck in
// one likelihood phase for very long stretches. Emits (iteration, log_l) to
// stdout, thinned, for plotting.
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tdns/csv.hpp"
#include "tdns/models/datasets.hpp"
#include "tdns/models/sinusoid.hpp"
#include "tdns/rng.hpp"

using namespace tdns;

int main(int argc, char** argv) {
  CLI::App app{"posterior-only MCMC trace on the sinusoid problem"};
  std::string data_path;
  std::uint64_t seed = 1;
  long long iterations = 2000000;
  long long thin = 100;
  app.add_option("--data", data_path, "sinusoid dataset")->required();
  app.add_option("--seed", seed, "chain seed");
  app.add_option("--iterations", iterations, "MCMC iterations");
  app.add_option("--thin", thin, "output every k-th iteration");
  CLI11_PARSE(app, argc, argv);

  const auto data = models::load_sinusoid_data(data_path);
  models::SinusoidModel model(data);
  Rng rng(seed);

  auto state = model.from_prior(rng);
  double log_l = model.log_likelihood(state);

  std::cout << "# iteration log_l\n";
  for (long long i = 1; i <= iterations; ++i) {
    auto trial = state;
    const double logh = model.perturb(trial, rng);
    const double log_l_new = model.log_likelihood(trial);
    const double log_alpha = logh + log_l_new - log_l;
    const double u = rng.rand();
    if (log_alpha >= 0.0 || (u > 0.0 && std::log(u) < log_alpha) || u == 0.0) {
      state = std::move(trial);
      log_l = log_l_new;
    }
    if (i % thin == 0) std::cout << i << ' ' << format_double(log_l) << '\n';
  }
  return 0;
}
