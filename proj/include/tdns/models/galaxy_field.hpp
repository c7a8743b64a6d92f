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

// Render one double-Gaussian profile into the image, scaled by sign.
// Evaluation is truncated beyond trunc_nsigma * width / sqrt(q) pixels from
// the centre; at the default 5 the dropped contribution is < e^-12.5 of peak.
void render_galaxy(const GalaxyComponent& comp, double sign, GalaxyImage& image,
                   double trunc_nsigma = 5.0);

// Conditional prior of the galaxy components:
//   flux  ~ Pareto(f_min, a_f), width ~ Pareto(w_min, a_w)
//   u ~ U(u_lo, u_hi), v ~ U(v_lo, v_hi)
//   positions uniform over the image extent padded by 10% per side,
//   q ~ U(0.2, 1), theta ~ U(0, pi).
// Hyperpriors: lower limits log-uniform on [1e-3, 1e3]; the inverses of the
// slopes uniform on (0, 1]; upper limits of u, v uniform on [0, 1) with the
// lower limit uniform on [0, upper). Internally the dependent pairs are
// stored as (hi, lo/hi) so every stored hyperparameter is independent and
// CDF-space steps need no density corrections.
class GalaxyConditionalPrior : public ConditionalPrior {
 public:
  GalaxyConditionalPrior(double image_width, double image_height, double pad_fraction = 0.1,
                         double limit_lo = 1e-3, double limit_hi = 1e3);

  int dimension() const override { return 8; }
  std::vector<double> hyper_from_prior(Rng& rng) const override;
  double hyper_perturb(std::vector<double>& alpha, Rng& rng) const override;
  void to_uniform(std::span<const double> x, std::span<double> u,
                  std::span<const double> alpha) const override;
  void from_uniform(std::span<const double> u, std::span<double> x,
                    std::span<const double> alpha) const override;
  double log_density(std::span<const double> x, std::span<const double> alpha) const override;
  std::vector<std::string> component_column_names() const override {
    return {"x", "y", "flux", "q", "theta", "width", "u", "v"};
  }
  std::vector<std::string> hyper_column_names() const override {
    return {"f_min", "a_f", "w_min", "a_w", "u_lo", "u_hi", "v_lo", "v_hi"};
  }
  std::vector<double> flatten_hyper(std::span<const double> alpha) const override;
  std::vector<double> unflatten_hyper(std::span<const double> flat) const override;

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }

 private:
  double x_lo_, x_hi_, y_lo_, y_hi_;
  double limit_lo_, limit_hi_, log_limit_span_;
};

struct GalaxyFieldConfig {
  int n_max = 100;
  double sigma_lo = 1e-3;
  double sigma_hi = 1e3;
  std::optional<double> fixed_sigma;
  double sigma_move_prob = 0.1;
  double trunc_nsigma = 5.0;
  bool incremental = true;
};

// N galaxies in a noisy image, iid Gaussian pixel noise with inferred sd.
// The mock image is cached in the state and patched from component diffs.
class GalaxyFieldModel {
 public:
  struct State {
    ComponentSet comps;
    double sigma = 1.0;
    GalaxyImage mock;
    std::uint64_t incremental_updates = 0;
  };

  GalaxyFieldModel(GalaxyImage data, GalaxyFieldConfig config = {});

  State from_prior(Rng& rng) const;
  double perturb(State& state, Rng& rng) const;
  double log_likelihood(const State& state) const;
  void rebuild_cache(State& state) const;
  void serialize(const State& state, std::vector<double>& out) const;
  State state_from_flat(std::span<const double> flat) const;
  std::vector<std::string> column_names() const;
  int flat_size() const;

  const GalaxyImage& data() const { return data_; }
  const GalaxyFieldConfig& config() const { return config_; }
  const ConditionalPrior& conditional_prior() const { return *prior_; }

  void set_incremental(bool on) { config_.incremental = on; }

 private:
  void apply_diff(State& state, const DiffRecord& diff) const;

  GalaxyImage data_;
  GalaxyFieldConfig config_;
  std::shared_ptr<const GalaxyConditionalPrior> prior_;
};

}  // namespace tdns::models
