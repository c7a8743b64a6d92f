#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tdns/conditional_prior.hpp"
#include "tdns/rng.hpp"

namespace tdns {

// What changed since the last consume_diff: component vectors subtracted and
// added, so a cached mock signal can be updated instead of re-rendered. Once
// the number of recorded changes reaches the current component count there is
// nothing to save by patching, so the record collapses to all_changed.
struct DiffRecord {
  std::vector<std::vector<double>> removed;
  std::vector<std::vector<double>> added;
  bool all_changed = false;

  bool empty() const { return !all_changed && removed.empty() && added.empty(); }

  void clear() {
    removed.clear();
    added.clear();
    all_changed = false;
  }
};

// The trans-dimensional state: N components of fixed dimension d, stored as
// an unordered multiset, plus the hyperparameters of their conditional prior.
// Component order carries no meaning; death selects by uniform index and
// removal swaps with the back. That exchangeability is load-bearing: it is
// what makes the birth/death Hastings factor exactly zero.
//
// All four proposal families preserve the joint prior
// p(N) p(alpha) prod_i p(x_i | alpha) under Metropolis with the returned log
// acceptance factor; the likelihood constraint is the caller's business.
class ComponentSet {
 public:
  ComponentSet(int n_max, std::shared_ptr<const ConditionalPrior> prior);

  void init_from_prior(Rng& rng);

  // Mixture dispatch over the four proposals: equal weights when n >= 1;
  // when n = 0 the component-move mass goes to the birth/death proposal.
  // Returns the log Hastings factor to add to the Metropolis log ratio.
  double perturb(Rng& rng);

  // Birth/death: step N with the heavy-tailed discrete kernel, draw new
  // components from p(x | alpha) or delete uniformly chosen ones.
  double propose_n(Rng& rng);

  // Move k components (k heavy-tailed on {1..n}, mode 1) through u-space:
  // one random coordinate of each gets a heavy-tailed step. Requires n >= 1.
  double propose_components(Rng& rng);

  // Move alpha keeping components fixed; the factor includes the ratio of
  // conditional prior densities over all components.
  double propose_hyper_fixed(Rng& rng);

  // Move alpha dragging every component through its fixed u-coordinates so
  // the set represents p(x | alpha') afterwards. The density ratio cancels
  // against the Jacobian of the drag map exactly.
  double propose_hyper_drag(Rng& rng);

  DiffRecord consume_diff();

  int n() const { return n_; }
  int n_max() const { return n_max_; }
  int dimension() const { return dim_; }
  const ConditionalPrior& prior() const { return *prior_; }

  std::span<const double> component(int i) const {
    return {components_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  std::span<const double> hyper() const { return hyper_; }

  // Flat record: n, then n_max slots of d values (unused slots zero-filled),
  // then the flattened hyperparameters. Fixed width, so CSV rows stay
  // rectangular.
  void serialize(std::vector<double>& out) const;
  void load_flat(std::span<const double> flat);
  int flat_size() const { return 1 + n_max_ * dim_ + prior_->flat_hyper_size(); }
  std::vector<std::string> column_names() const;

 private:
  std::span<double> component_mut(int i) {
    return {components_.data() + static_cast<std::size_t>(i) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  void record_removed(std::span<const double> x);
  void record_added(std::span<const double> x);
  void collapse_diff_if_large();

  std::shared_ptr<const ConditionalPrior> prior_;
  int n_max_ = 0;
  int dim_ = 0;
  int n_ = 0;
  std::vector<double> components_;  // n_ * dim_, row-major
  std::vector<double> hyper_;
  DiffRecord diff_;
};

}  // namespace tdns
