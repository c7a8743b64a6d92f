#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tdns/component_set.hpp"
#include "tdns/conditional_prior.hpp"
#include "tdns/models/datasets.hpp"
#include "tdns/rng.hpp"

namespace tdns::models {

// Per-sinusoid prior: amplitude ~ Exponential(mu) with mu the single
// hyperparameter (log-uniform on [1e-3, 1e3]), period log-uniform between
// fixed boundaries, phase uniform on [0, 2 pi).
class SinusoidConditionalPrior : public ConditionalPrior {
 public:
  SinusoidConditionalPrior(double period_lo = 0.1, double period_hi = 1000.0,
                           double mu_lo = 1e-3, double mu_hi = 1e3);

  int dimension() const override { return 3; }
  std::vector<double> hyper_from_prior(Rng& rng) const override;
  double hyper_perturb(std::vector<double>& alpha, Rng& rng) const override;
  void to_uniform(std::span<const double> x, std::span<double> u,
                  std::span<const double> alpha) const override;
  void from_uniform(std::span<const double> u, std::span<double> x,
                    std::span<const double> alpha) const override;
  double log_density(std::span<const double> x, std::span<const double> alpha) const override;
  std::vector<std::string> component_column_names() const override { return {"a", "t", "phi"}; }
  std::vector<std::string> hyper_column_names() const override { return {"mu"}; }

  double period_lo() const { return period_lo_; }
  double period_hi() const { return period_hi_; }

 private:
  double period_lo_, period_hi_, log_period_span_;
  double mu_lo_, mu_hi_, log_mu_span_;
};

struct SinusoidConfig {
  int n_max = 10;
  double period_lo = 0.1;
  double period_hi = 1000.0;
  double mu_lo = 1e-3;
  double mu_hi = 1e3;
  double sigma_lo = 1e-3;
  double sigma_hi = 1e3;
  std::optional<double> fixed_sigma;  // set to pin the noise sd
  double sigma_move_prob = 0.1;
  bool constant_likelihood = false;  // prior-only runs
  bool incremental = true;           // maintain the mock-signal cache by diffs
};

// N sinusoids observed with iid Gaussian noise of inferred sd sigma. The
// mock signal over the data grid is cached in the state and updated from
// the component diff, since rendering is the expensive part of the
// likelihood.
class SinusoidModel {
 public:
  struct State {
    ComponentSet comps;
    double sigma = 1.0;
    std::vector<double> mock;
    std::uint64_t incremental_updates = 0;
  };

  SinusoidModel(SinusoidData data, SinusoidConfig config = {});

  State from_prior(Rng& rng) const;
  double perturb(State& state, Rng& rng) const;
  double log_likelihood(const State& state) const;
  void rebuild_cache(State& state) const;
  void serialize(const State& state, std::vector<double>& out) const;
  State state_from_flat(std::span<const double> flat) const;
  std::vector<std::string> column_names() const;
  int flat_size() const;

  const SinusoidData& data() const { return data_; }
  const SinusoidConfig& config() const { return config_; }
  const ConditionalPrior& conditional_prior() const { return *prior_; }

  void set_incremental(bool on) { config_.incremental = on; }

  // signal of one component over the data grid, scaled by sign
  void render_component(std::span<const double> comp, double sign,
                        std::vector<double>& mock) const;

 private:
  void apply_diff(State& state, const DiffRecord& diff) const;
  double sigma_from_prior(Rng& rng) const;

  SinusoidData data_;
  SinusoidConfig config_;
  std::shared_ptr<const SinusoidConditionalPrior> prior_;
};

}  // namespace tdns::models
