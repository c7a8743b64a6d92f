#include "tdns/models/sinusoid.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace tdns::models {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double two_pi = 6.28318530717958647692;

double clamp_unit_open(double u) {
  if (u >= 1.0) return std::nextafter(1.0, 0.0);
  if (u < 0.0) return 0.0;
  return u;
}
}  // namespace

SinusoidConditionalPrior::SinusoidConditionalPrior(double period_lo, double period_hi,
                                                   double mu_lo, double mu_hi)
    : period_lo_(period_lo),
      period_hi_(period_hi),
      log_period_span_(std::log(period_hi / period_lo)),
      mu_lo_(mu_lo),
      mu_hi_(mu_hi),
      log_mu_span_(std::log(mu_hi / mu_lo)) {}

std::vector<double> SinusoidConditionalPrior::hyper_from_prior(Rng& rng) const {
  return {mu_lo_ * std::exp(rng.rand() * log_mu_span_)};
}

double SinusoidConditionalPrior::hyper_perturb(std::vector<double>& alpha, Rng& rng) const {
  double v = std::log(alpha[0] / mu_lo_) / log_mu_span_;
  v = heavy_step_unit(clamp_unit_open(v), rng);
  alpha[0] = mu_lo_ * std::exp(v * log_mu_span_);
  return 0.0;
}

void SinusoidConditionalPrior::to_uniform(std::span<const double> x, std::span<double> u,
                                          std::span<const double> alpha) const {
  const double mu = alpha[0];
  u[0] = clamp_unit_open(-std::expm1(-x[0] / mu));
  u[1] = clamp_unit_open(std::log(x[1] / period_lo_) / log_period_span_);
  u[2] = clamp_unit_open(x[2] / two_pi);
}

void SinusoidConditionalPrior::from_uniform(std::span<const double> u, std::span<double> x,
                                            std::span<const double> alpha) const {
  const double mu = alpha[0];
  x[0] = -mu * std::log1p(-clamp_unit_open(u[0]));
  x[1] = period_lo_ * std::exp(u[1] * log_period_span_);
  x[2] = two_pi * u[2];
}

double SinusoidConditionalPrior::log_density(std::span<const double> x,
                                             std::span<const double> alpha) const {
  const double mu = alpha[0];
  if (x[0] < 0.0) return neg_inf;
  if (x[1] < period_lo_ || x[1] > period_hi_) return neg_inf;
  if (x[2] < 0.0 || x[2] >= two_pi) return neg_inf;
  return -std::log(mu) - x[0] / mu - std::log(x[1]) - std::log(log_period_span_) -
         std::log(two_pi);
}

SinusoidModel::SinusoidModel(SinusoidData data, SinusoidConfig config)
    : data_(std::move(data)),
      config_(config),
      prior_(std::make_shared<SinusoidConditionalPrior>(config.period_lo, config.period_hi,
                                                        config.mu_lo, config.mu_hi)) {
  assert(!data_.t.empty() && data_.t.size() == data_.y.size());
}

void SinusoidModel::render_component(std::span<const double> comp, double sign,
                                     std::vector<double>& mock) const {
  const double amplitude = sign * comp[0];
  const double omega = two_pi / comp[1];
  const double phase = comp[2];
  const std::size_t m = data_.t.size();
  for (std::size_t i = 0; i < m; ++i) mock[i] += amplitude * std::sin(omega * data_.t[i] + phase);
}

void SinusoidModel::rebuild_cache(State& state) const {
  state.mock.assign(data_.t.size(), 0.0);
  for (int i = 0; i < state.comps.n(); ++i) render_component(state.comps.component(i), 1.0, state.mock);
  state.incremental_updates = 0;
}

void SinusoidModel::apply_diff(State& state, const DiffRecord& diff) const {
  if (config_.constant_likelihood) return;
  if (!config_.incremental) {  // baseline mode: recompute the mock from scratch
    rebuild_cache(state);
    return;
  }
  if (diff.empty()) return;
  if (diff.all_changed || state.incremental_updates >= 10000) {
    rebuild_cache(state);
    return;
  }
  for (const auto& comp : diff.removed) render_component(comp, -1.0, state.mock);
  for (const auto& comp : diff.added) render_component(comp, 1.0, state.mock);
  ++state.incremental_updates;
}

double SinusoidModel::sigma_from_prior(Rng& rng) const {
  if (config_.fixed_sigma) return *config_.fixed_sigma;
  return config_.sigma_lo * std::exp(rng.rand() * std::log(config_.sigma_hi / config_.sigma_lo));
}

SinusoidModel::State SinusoidModel::from_prior(Rng& rng) const {
  State state{ComponentSet(config_.n_max, prior_), 1.0, {}, 0};
  state.comps.init_from_prior(rng);
  state.comps.consume_diff();
  state.sigma = sigma_from_prior(rng);
  rebuild_cache(state);
  return state;
}

double SinusoidModel::perturb(State& state, Rng& rng) const {
  if (!config_.fixed_sigma && rng.rand() < config_.sigma_move_prob) {
    const double span = std::log(config_.sigma_hi / config_.sigma_lo);
    double v = std::log(state.sigma / config_.sigma_lo) / span;
    v = heavy_step_unit(clamp_unit_open(v), rng);
    state.sigma = config_.sigma_lo * std::exp(v * span);
    return 0.0;
  }
  const double logh = state.comps.perturb(rng);
  apply_diff(state, state.comps.consume_diff());
  return logh;
}

double SinusoidModel::log_likelihood(const State& state) const {
  if (config_.constant_likelihood) return 0.0;
  const std::size_t m = data_.y.size();
  const double sigma = state.sigma;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = data_.y[i] - state.mock[i];
    ssr += r * r;
  }
  return -0.5 * static_cast<double>(m) * std::log(two_pi * sigma * sigma) -
         ssr / (2.0 * sigma * sigma);
}

void SinusoidModel::serialize(const State& state, std::vector<double>& out) const {
  state.comps.serialize(out);
  out.push_back(state.sigma);
}

SinusoidModel::State SinusoidModel::state_from_flat(std::span<const double> flat) const {
  State state{ComponentSet(config_.n_max, prior_), 1.0, {}, 0};
  assert(static_cast<int>(flat.size()) == flat_size());
  state.comps.load_flat(flat.first(flat.size() - 1));
  state.comps.consume_diff();
  state.sigma = flat.back();
  rebuild_cache(state);
  return state;
}

std::vector<std::string> SinusoidModel::column_names() const {
  ComponentSet dummy(config_.n_max, prior_);
  auto names = dummy.column_names();
  names.emplace_back("sigma");
  return names;
}

int SinusoidModel::flat_size() const {
  ComponentSet dummy(config_.n_max, prior_);
  return dummy.flat_size() + 1;
}

}  // namespace tdns::models
