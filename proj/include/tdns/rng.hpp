#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>

namespace tdns {

// Seedable xoshiro256++ generator. Identical seeds give identical streams on
// every platform; all randomness in the project flows through this class so
// runs are reproducible bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    seed_ = seed;
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double rand() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double randn() {
    double u1 = rand();
    while (u1 == 0.0) u1 = rand();
    const double u2 = rand();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Uniform on {0, ..., k-1}.
  int rand_int(int k) {
    assert(k > 0);
    const int r = static_cast<int>(rand() * k);
    return r < k ? r : k - 1;
  }

  // Heavy-tailed step size 10^(1.5 - 6a) * b with a ~ U(0,1), b ~ N(0,1).
  // A scale mixture of normals: steps span prior-sized jumps down to ~1e-4.5
  // of the prior width, so no per-level tuning is needed.
  double randh() { return std::pow(10.0, 1.5 - 6.0 * rand()) * randn(); }

 private:
  static constexpr double two_pi = 6.28318530717958647692;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 4> state_{};
};

// Derive an independent stream for worker `index` of a run seeded with `seed`.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// mod(x, 1) into [0, 1), guarding the rounding edge where x - floor(x) == 1.
inline double wrap_unit(double x) {
  double u = x - std::floor(x);
  if (u >= 1.0) u = 0.0;
  if (u < 0.0) u = 0.0;
  return u;
}

// u' = mod(u + 10^(1.5-6a) * b, 1) for given (a, b). Symmetric: for fixed
// (a, b) the map is a bijection of [0,1), and the step density is even in b,
// so a Metropolis chain that always accepts preserves Uniform(0,1).
inline double heavy_step_unit(double u, double a, double b) {
  assert(u >= 0.0 && u < 1.0);
  return wrap_unit(u + std::pow(10.0, 1.5 - 6.0 * a) * b);
}

inline double heavy_step_unit(double u, Rng& rng) {
  const double a = rng.rand();
  const double b = rng.randn();
  return heavy_step_unit(u, a, b);
}

// Heavy-tailed step on the discrete torus {0..n_max}: n is treated as a real
// number by lifting it to n + frac with frac uniform in its unit cell, then
// stepped with the kernel above scaled to the full range and floored. The
// uniform lift is what makes the floored kernel symmetric: without it, small
// negative steps leave the cell while small positive ones land back on n.
// May return n itself.
inline int heavy_step_integer_raw(int n, int n_max, double frac, double a, double b) {
  assert(n >= 0 && n <= n_max);
  const double range = static_cast<double>(n_max) + 1.0;
  const double delta = range * std::pow(10.0, 1.5 - 6.0 * a) * b;
  double x = std::fmod(static_cast<double>(n) + frac + delta, range);
  if (x < 0.0) x += range;
  int out = static_cast<int>(x);
  if (out > n_max) out = n_max;
  if (out < 0) out = 0;
  return out;
}

// Full discrete kernel: if the floored step lands back on n, the proposal is
// regenerated as n+1 or n-1 with probability 1/2 each, wrapped into
// {0..n_max}. The resulting transition matrix is symmetric.
inline int heavy_step_integer(int n, int n_max, Rng& rng) {
  assert(n >= 0 && n <= n_max);
  if (n_max == 0) return 0;
  const double frac = rng.rand();
  const double a = rng.rand();
  const double b = rng.randn();
  int out = heavy_step_integer_raw(n, n_max, frac, a, b);
  if (out == n) {
    out = (rng.rand() < 0.5) ? n + 1 : n - 1;
    if (out < 0) out = n_max;
    if (out > n_max) out = 0;
  }
  return out;
}

}  // namespace tdns
