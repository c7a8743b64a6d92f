#include "tdns/models/galaxy_field.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace tdns::models {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 6.28318530717958647692;
constexpr double q_lo = 0.2, q_hi = 1.0;

double clamp_unit_open(double u) {
  if (u >= 1.0) return std::nextafter(1.0, 0.0);
  if (u < 0.0) return 0.0;
  return u;
}

double pareto_cdf(double x, double x_min, double a) {
  if (x <= x_min) return 0.0;
  return clamp_unit_open(-std::expm1(a * std::log(x_min / x)));
}

double pareto_quantile(double p, double x_min, double a) {
  return x_min * std::exp(-std::log1p(-clamp_unit_open(p)) / a);
}

double pareto_log_density(double x, double x_min, double a) {
  if (x < x_min) return neg_inf;
  return std::log(a) + a * std::log(x_min) - (a + 1.0) * std::log(x);
}
}  // namespace

void render_galaxy(const GalaxyComponent& comp, double sign, GalaxyImage& image,
                   double trunc_nsigma) {
  const double xc = comp[0], yc = comp[1], flux = comp[2], q = comp[3], theta = comp[4],
               w = comp[5];
  const double ratio = std::max(comp[6], 1e-9);
  const double v = comp[7];

  const double qs = std::max(q, 1e-6);
  const double radius = trunc_nsigma * w / std::sqrt(qs);
  const int ix_lo = std::max(0, static_cast<int>(std::floor(xc - radius - 0.5)));
  const int ix_hi = std::min(image.width - 1, static_cast<int>(std::ceil(xc + radius - 0.5)));
  const int iy_lo = std::max(0, static_cast<int>(std::floor(yc - radius - 0.5)));
  const int iy_hi = std::min(image.height - 1, static_cast<int>(std::ceil(yc + radius - 0.5)));
  if (ix_lo > ix_hi || iy_lo > iy_hi) return;

  const double c = std::cos(theta), s = std::sin(theta);
  const double w2 = w * w;
  const double uw2 = ratio * ratio * w2;
  const double amp1 = sign * flux * (1.0 - v) / (two_pi * w2);
  const double amp2 = sign * flux * v / (two_pi * uw2);
  const double r2max = radius * radius;

  for (int iy = iy_lo; iy <= iy_hi; ++iy) {
    const double dy = (iy + 0.5) - yc;
    double* row = &image.at(0, iy);
    for (int ix = ix_lo; ix <= ix_hi; ++ix) {
      const double dx = (ix + 0.5) - xc;
      if (dx * dx + dy * dy > r2max) continue;
      const double xr = c * dx + s * dy;
      const double yr = -s * dx + c * dy;
      const double arg = qs * xr * xr + yr * yr / qs;
      row[ix] += amp1 * std::exp(-arg / (2.0 * w2)) + amp2 * std::exp(-arg / (2.0 * uw2));
    }
  }
}

GalaxyConditionalPrior::GalaxyConditionalPrior(double image_width, double image_height,
                                               double pad_fraction, double limit_lo,
                                               double limit_hi)
    : x_lo_(-pad_fraction * image_width),
      x_hi_((1.0 + pad_fraction) * image_width),
      y_lo_(-pad_fraction * image_height),
      y_hi_((1.0 + pad_fraction) * image_height),
      limit_lo_(limit_lo),
      limit_hi_(limit_hi),
      log_limit_span_(std::log(limit_hi / limit_lo)) {}

// internal alpha: f_min, inv_a_f, w_min, inv_a_w, u_hi, u_ratio, v_hi, v_ratio
std::vector<double> GalaxyConditionalPrior::hyper_from_prior(Rng& rng) const {
  std::vector<double> alpha(8);
  alpha[0] = limit_lo_ * std::exp(rng.rand() * log_limit_span_);
  alpha[1] = std::max(rng.rand(), 1e-9);
  alpha[2] = limit_lo_ * std::exp(rng.rand() * log_limit_span_);
  alpha[3] = std::max(rng.rand(), 1e-9);
  alpha[4] = rng.rand();
  alpha[5] = rng.rand();
  alpha[6] = rng.rand();
  alpha[7] = rng.rand();
  return alpha;
}

double GalaxyConditionalPrior::hyper_perturb(std::vector<double>& alpha, Rng& rng) const {
  const int which = rng.rand_int(8);
  if (which == 0 || which == 2) {
    double v = std::log(alpha[which] / limit_lo_) / log_limit_span_;
    v = heavy_step_unit(clamp_unit_open(v), rng);
    alpha[which] = limit_lo_ * std::exp(v * log_limit_span_);
  } else {
    double v = heavy_step_unit(clamp_unit_open(alpha[which]), rng);
    if (which == 1 || which == 3) v = std::max(v, 1e-9);
    alpha[which] = v;
  }
  return 0.0;
}

void GalaxyConditionalPrior::to_uniform(std::span<const double> x, std::span<double> u,
                                        std::span<const double> alpha) const {
  const double f_min = alpha[0], a_f = 1.0 / alpha[1];
  const double w_min = alpha[2], a_w = 1.0 / alpha[3];
  const double u_hi = alpha[4], u_lo = alpha[4] * alpha[5];
  const double v_hi = alpha[6], v_lo = alpha[6] * alpha[7];

  u[0] = clamp_unit_open((x[0] - x_lo_) / (x_hi_ - x_lo_));
  u[1] = clamp_unit_open((x[1] - y_lo_) / (y_hi_ - y_lo_));
  u[2] = pareto_cdf(x[2], f_min, a_f);
  u[3] = clamp_unit_open((x[3] - q_lo) / (q_hi - q_lo));
  u[4] = clamp_unit_open(x[4] / pi);
  u[5] = pareto_cdf(x[5], w_min, a_w);
  const double uw = u_hi - u_lo, vw = v_hi - v_lo;
  u[6] = uw > 0.0 ? clamp_unit_open((x[6] - u_lo) / uw) : 0.5;
  u[7] = vw > 0.0 ? clamp_unit_open((x[7] - v_lo) / vw) : 0.5;
}

void GalaxyConditionalPrior::from_uniform(std::span<const double> u, std::span<double> x,
                                          std::span<const double> alpha) const {
  const double f_min = alpha[0], a_f = 1.0 / alpha[1];
  const double w_min = alpha[2], a_w = 1.0 / alpha[3];
  const double u_hi = alpha[4], u_lo = alpha[4] * alpha[5];
  const double v_hi = alpha[6], v_lo = alpha[6] * alpha[7];

  x[0] = x_lo_ + u[0] * (x_hi_ - x_lo_);
  x[1] = y_lo_ + u[1] * (y_hi_ - y_lo_);
  x[2] = pareto_quantile(u[2], f_min, a_f);
  x[3] = q_lo + u[3] * (q_hi - q_lo);
  x[4] = u[4] * pi;
  x[5] = pareto_quantile(u[5], w_min, a_w);
  x[6] = u_lo + u[6] * (u_hi - u_lo);
  x[7] = v_lo + u[7] * (v_hi - v_lo);
}

double GalaxyConditionalPrior::log_density(std::span<const double> x,
                                           std::span<const double> alpha) const {
  const double f_min = alpha[0], a_f = 1.0 / alpha[1];
  const double w_min = alpha[2], a_w = 1.0 / alpha[3];
  const double u_hi = alpha[4], u_lo = alpha[4] * alpha[5];
  const double v_hi = alpha[6], v_lo = alpha[6] * alpha[7];

  if (x[0] < x_lo_ || x[0] > x_hi_) return neg_inf;
  if (x[1] < y_lo_ || x[1] > y_hi_) return neg_inf;
  if (x[3] < q_lo || x[3] > q_hi) return neg_inf;
  if (x[4] < 0.0 || x[4] >= pi) return neg_inf;
  if (x[6] < u_lo || x[6] > u_hi) return neg_inf;
  if (x[7] < v_lo || x[7] > v_hi) return neg_inf;

  double out = -std::log(x_hi_ - x_lo_) - std::log(y_hi_ - y_lo_) - std::log(q_hi - q_lo) -
               std::log(pi);
  out += pareto_log_density(x[2], f_min, a_f);
  out += pareto_log_density(x[5], w_min, a_w);
  out += -std::log(std::max(u_hi - u_lo, 1e-12));
  out += -std::log(std::max(v_hi - v_lo, 1e-12));
  return out;
}

// serialized order: f_min, a_f, w_min, a_w, u_lo, u_hi, v_lo, v_hi
std::vector<double> GalaxyConditionalPrior::flatten_hyper(std::span<const double> alpha) const {
  return {alpha[0], 1.0 / alpha[1],
          alpha[2], 1.0 / alpha[3],
          alpha[4] * alpha[5], alpha[4],
          alpha[6] * alpha[7], alpha[6]};
}

std::vector<double> GalaxyConditionalPrior::unflatten_hyper(std::span<const double> flat) const {
  // flat: f_min, a_f, w_min, a_w, u_lo, u_hi, v_lo, v_hi
  std::vector<double> alpha(8);
  alpha[0] = flat[0];
  alpha[1] = 1.0 / flat[1];
  alpha[2] = flat[2];
  alpha[3] = 1.0 / flat[3];
  alpha[4] = flat[5];
  alpha[5] = flat[5] > 0.0 ? flat[4] / flat[5] : 0.5;
  alpha[6] = flat[7];
  alpha[7] = flat[7] > 0.0 ? flat[6] / flat[7] : 0.5;
  return alpha;
}

GalaxyFieldModel::GalaxyFieldModel(GalaxyImage data, GalaxyFieldConfig config)
    : data_(std::move(data)),
      config_(config),
      prior_(std::make_shared<GalaxyConditionalPrior>(data_.width, data_.height)) {
  assert(data_.width > 0 && data_.height > 0);
}

void GalaxyFieldModel::rebuild_cache(State& state) const {
  state.mock.width = data_.width;
  state.mock.height = data_.height;
  state.mock.pixels.assign(data_.size(), 0.0);
  GalaxyComponent comp;
  for (int i = 0; i < state.comps.n(); ++i) {
    const auto c = state.comps.component(i);
    std::copy(c.begin(), c.end(), comp.begin());
    render_galaxy(comp, 1.0, state.mock, config_.trunc_nsigma);
  }
  state.incremental_updates = 0;
}

void GalaxyFieldModel::apply_diff(State& state, const DiffRecord& diff) const {
  if (!config_.incremental) {  // baseline mode: recompute the mock from scratch
    rebuild_cache(state);
    return;
  }
  if (diff.empty()) return;
  if (diff.all_changed || state.incremental_updates >= 10000) {
    rebuild_cache(state);
    return;
  }
  GalaxyComponent comp;
  for (const auto& r : diff.removed) {
    std::copy(r.begin(), r.end(), comp.begin());
    render_galaxy(comp, -1.0, state.mock, config_.trunc_nsigma);
  }
  for (const auto& a : diff.added) {
    std::copy(a.begin(), a.end(), comp.begin());
    render_galaxy(comp, 1.0, state.mock, config_.trunc_nsigma);
  }
  ++state.incremental_updates;
}

GalaxyFieldModel::State GalaxyFieldModel::from_prior(Rng& rng) const {
  State state{ComponentSet(config_.n_max, prior_), 1.0, GalaxyImage{}, 0};
  state.comps.init_from_prior(rng);
  state.comps.consume_diff();
  if (config_.fixed_sigma)
    state.sigma = *config_.fixed_sigma;
  else
    state.sigma =
        config_.sigma_lo * std::exp(rng.rand() * std::log(config_.sigma_hi / config_.sigma_lo));
  rebuild_cache(state);
  return state;
}

double GalaxyFieldModel::perturb(State& state, Rng& rng) const {
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

double GalaxyFieldModel::log_likelihood(const State& state) const {
  const std::size_t m = data_.size();
  const double sigma = state.sigma;
  double ssr = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = data_.pixels[i] - state.mock.pixels[i];
    ssr += r * r;
  }
  return -0.5 * static_cast<double>(m) * std::log(two_pi * sigma * sigma) -
         ssr / (2.0 * sigma * sigma);
}

void GalaxyFieldModel::serialize(const State& state, std::vector<double>& out) const {
  state.comps.serialize(out);
  out.push_back(state.sigma);
}

GalaxyFieldModel::State GalaxyFieldModel::state_from_flat(std::span<const double> flat) const {
  State state{ComponentSet(config_.n_max, prior_), 1.0, GalaxyImage{}, 0};
  assert(static_cast<int>(flat.size()) == flat_size());
  state.comps.load_flat(flat.first(flat.size() - 1));
  state.comps.consume_diff();
  state.sigma = flat.back();
  rebuild_cache(state);
  return state;
}

std::vector<std::string> GalaxyFieldModel::column_names() const {
  ComponentSet dummy(config_.n_max, prior_);
  auto names = dummy.column_names();
  names.emplace_back("sigma");
  return names;
}

int GalaxyFieldModel::flat_size() const {
  ComponentSet dummy(config_.n_max, prior_);
  return dummy.flat_size() + 1;
}

}  // namespace tdns::models
