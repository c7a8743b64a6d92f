#include "tdns/component_set.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace tdns {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
}

ComponentSet::ComponentSet(int n_max, std::shared_ptr<const ConditionalPrior> prior)
    : prior_(std::move(prior)), n_max_(n_max), dim_(prior_->dimension()) {
  assert(n_max_ >= 0);
  hyper_.assign(static_cast<std::size_t>(prior_->flat_hyper_size()), 0.0);
}

void ComponentSet::init_from_prior(Rng& rng) {
  hyper_ = prior_->hyper_from_prior(rng);
  n_ = rng.rand_int(n_max_ + 1);
  components_.assign(static_cast<std::size_t>(n_) * dim_, 0.0);
  for (int i = 0; i < n_; ++i) prior_->draw_component(component_mut(i), hyper_, rng);
  diff_.clear();
  diff_.all_changed = true;
}

double ComponentSet::perturb(Rng& rng) {
  const double r = rng.rand();
  const bool empty = n_ == 0;
  // at n = 0 the component-move mass goes to the birth/death proposal, so a
  // move that crosses the 0 boundary is selected with probability 1/2 on one
  // side and 1/4 on the other; the selection ratio enters the Hastings factor
  if (empty ? (r < 0.50) : (r < 0.25)) {
    const int n_before = n_;
    double logh = propose_n(rng);
    if (n_before == 0 && n_ > 0)
      logh += std::log(0.5);
    else if (n_before > 0 && n_ == 0)
      logh += std::log(2.0);
    return logh;
  }
  if (!empty && r < 0.50) return propose_components(rng);
  if (r < 0.75) return propose_hyper_fixed(rng);
  return propose_hyper_drag(rng);
}

double ComponentSet::propose_n(Rng& rng) {
  if (n_max_ == 0) return 0.0;
  const int n_new = heavy_step_integer(n_, n_max_, rng);
  if (n_new > n_) {
    components_.resize(static_cast<std::size_t>(n_new) * dim_, 0.0);
    for (int i = n_; i < n_new; ++i) {
      prior_->draw_component(component_mut(i), hyper_, rng);
      record_added(component(i));
    }
    n_ = n_new;
  } else if (n_new < n_) {
    for (int k = n_; k > n_new; --k) {
      const int idx = rng.rand_int(k);
      record_removed(component(idx));
      // swap with the back; order is meaningless
      if (idx != k - 1) {
        std::copy_n(components_.data() + static_cast<std::size_t>(k - 1) * dim_, dim_,
                    components_.data() + static_cast<std::size_t>(idx) * dim_);
      }
      components_.resize(static_cast<std::size_t>(k - 1) * dim_);
    }
    n_ = n_new;
  }
  collapse_diff_if_large();
  return 0.0;
}

double ComponentSet::propose_components(Rng& rng) {
  assert(n_ >= 1);
  const double a = rng.rand();
  int k = 1 + static_cast<int>(std::floor(n_ * std::pow(10.0, -6.0 * a)));
  k = std::clamp(k, 1, n_);

  // partial Fisher-Yates for k distinct indices
  std::vector<int> idx(n_);
  for (int i = 0; i < n_; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + rng.rand_int(n_ - i);
    std::swap(idx[i], idx[j]);
  }

  std::vector<double> u(dim_);
  for (int t = 0; t < k; ++t) {
    const int i = idx[t];
    record_removed(component(i));
    prior_->to_uniform(component(i), u, hyper_);
    const int coord = rng.rand_int(dim_);
    u[coord] = heavy_step_unit(u[coord], rng);
    prior_->from_uniform(u, component_mut(i), hyper_);
    record_added(component(i));
  }
  collapse_diff_if_large();
  return 0.0;
}

double ComponentSet::propose_hyper_fixed(Rng& rng) {
  const std::vector<double> old_hyper = hyper_;
  double logh = prior_->hyper_perturb(hyper_, rng);
  double log_new = 0.0, log_old = 0.0;
  for (int i = 0; i < n_; ++i) {
    log_new += prior_->log_density(component(i), hyper_);
    log_old += prior_->log_density(component(i), old_hyper);
  }
  if (log_new == neg_inf) return neg_inf;
  logh += log_new - log_old;
  return logh;
}

double ComponentSet::propose_hyper_drag(Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n_) * dim_);
  for (int i = 0; i < n_; ++i) {
    prior_->to_uniform(component(i), {u.data() + static_cast<std::size_t>(i) * dim_,
                                      static_cast<std::size_t>(dim_)},
                       hyper_);
  }
  const double logh = prior_->hyper_perturb(hyper_, rng);
  for (int i = 0; i < n_; ++i) {
    prior_->from_uniform({u.data() + static_cast<std::size_t>(i) * dim_,
                          static_cast<std::size_t>(dim_)},
                         component_mut(i), hyper_);
  }
  if (n_ > 0) {
    diff_.removed.clear();
    diff_.added.clear();
    diff_.all_changed = true;
  }
  return logh;
}

DiffRecord ComponentSet::consume_diff() {
  DiffRecord out = std::move(diff_);
  diff_ = DiffRecord{};
  return out;
}

void ComponentSet::record_removed(std::span<const double> x) {
  diff_.removed.emplace_back(x.begin(), x.end());
}

void ComponentSet::record_added(std::span<const double> x) {
  diff_.added.emplace_back(x.begin(), x.end());
}

// Once the recorded changes cover the whole set, patching a cache costs as
// much as re-rendering it; flag all_changed. The sequences stay intact for
// bookkeeping (a full drag clears them instead, since every component moved).
void ComponentSet::collapse_diff_if_large() {
  if (diff_.all_changed) return;
  if (static_cast<int>(diff_.removed.size() + diff_.added.size()) >= n_)
    diff_.all_changed = true;
}

void ComponentSet::serialize(std::vector<double>& out) const {
  out.push_back(static_cast<double>(n_));
  out.insert(out.end(), components_.begin(), components_.end());
  out.insert(out.end(), static_cast<std::size_t>(n_max_ - n_) * dim_, 0.0);
  const std::vector<double> flat_hyper = prior_->flatten_hyper(hyper_);
  out.insert(out.end(), flat_hyper.begin(), flat_hyper.end());
}

void ComponentSet::load_flat(std::span<const double> flat) {
  assert(static_cast<int>(flat.size()) == flat_size());
  n_ = static_cast<int>(flat[0]);
  n_ = std::clamp(n_, 0, n_max_);
  components_.assign(flat.begin() + 1, flat.begin() + 1 + static_cast<std::size_t>(n_) * dim_);
  hyper_ = prior_->unflatten_hyper(flat.subspan(1 + static_cast<std::size_t>(n_max_) * dim_));
  diff_.clear();
  diff_.all_changed = true;
}

std::vector<std::string> ComponentSet::column_names() const {
  std::vector<std::string> names;
  names.emplace_back("n");
  const auto comp_names = prior_->component_column_names();
  for (int i = 0; i < n_max_; ++i)
    for (const auto& c : comp_names) names.push_back(c + "_" + std::to_string(i + 1));
  const auto hyper_names = prior_->hyper_column_names();
  names.insert(names.end(), hyper_names.begin(), hyper_names.end());
  return names;
}

}  // namespace tdns
