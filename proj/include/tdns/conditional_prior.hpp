#pragma once

#include <span>
#include <string>
#include <vector>

#include "tdns/rng.hpp"

namespace tdns {

// The hierarchical layer shared by all components: a per-component prior
// p(x | alpha) together with its CDF transform F and inverse G. F maps a
// draw from p(x | alpha) to iid Uniform(0,1) coordinates; proposals are made
// in u-space where the prior is flat, so component moves need no Hastings
// correction and hyperparameter "drag" moves are exact.
//
// Implementations are immutable behaviour bundles; the hyperparameter vector
// itself lives in the ComponentSet and is passed in explicitly.
class ConditionalPrior {
 public:
  virtual ~ConditionalPrior() = default;

  // Number of coordinates per component.
  virtual int dimension() const = 0;

  virtual std::vector<double> hyper_from_prior(Rng& rng) const = 0;

  // Perturb alpha in place. Returns the combined log factor
  // log p(alpha') - log p(alpha) + log q(alpha|alpha') - log q(alpha'|alpha);
  // implementations usually step in the CDF space of the hyperprior, where
  // the factor is exactly zero.
  virtual double hyper_perturb(std::vector<double>& alpha, Rng& rng) const = 0;

  // u = F(x; alpha), each coordinate in [0, 1).
  virtual void to_uniform(std::span<const double> x, std::span<double> u,
                          std::span<const double> alpha) const = 0;

  // x = G(u; alpha), the inverse of F.
  virtual void from_uniform(std::span<const double> u, std::span<double> x,
                            std::span<const double> alpha) const = 0;

  // log p(x | alpha); -infinity outside the support.
  virtual double log_density(std::span<const double> x,
                             std::span<const double> alpha) const = 0;

  virtual std::vector<std::string> component_column_names() const = 0;
  virtual std::vector<std::string> hyper_column_names() const = 0;

  // Map the internal hyperparameter vector to its serialized form (and back).
  // Defaults to the identity; override when the internal parametrization
  // differs from the documented one.
  virtual std::vector<double> flatten_hyper(std::span<const double> alpha) const {
    return {alpha.begin(), alpha.end()};
  }
  virtual std::vector<double> unflatten_hyper(std::span<const double> flat) const {
    return {flat.begin(), flat.end()};
  }
  virtual int flat_hyper_size() const { return static_cast<int>(hyper_column_names().size()); }

  // Draw a fresh component from p(x | alpha).
  void draw_component(std::span<double> x, std::span<const double> alpha, Rng& rng) const {
    std::vector<double> u(dimension());
    for (auto& ui : u) ui = rng.rand();
    from_uniform(u, x, alpha);
  }
};

}  // namespace tdns
