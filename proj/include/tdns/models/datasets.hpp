#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace tdns::models {

struct SinusoidData {
  std::vector<double> t;
  std::vector<double> y;
};

// y(t) = sin(2 pi t / 30) + 0.3 sin(2 pi t / 2 + 1)
double sinusoid_true_signal(double t);

SinusoidData generate_sinusoid_data(std::uint64_t seed, int num_points = 1001,
                                    double t_lo = 0.0, double t_hi = 100.0,
                                    double noise_sd = 0.5);

void write_sinusoid_data(const std::filesystem::path& path, const SinusoidData& data,
                         std::uint64_t seed, double noise_sd);
SinusoidData load_sinusoid_data(const std::filesystem::path& path);

struct GalaxyImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major, pixel centers at (ix + 0.5, iy + 0.5)

  double& at(int ix, int iy) { return pixels[static_cast<std::size_t>(iy) * width + ix]; }
  double at(int ix, int iy) const { return pixels[static_cast<std::size_t>(iy) * width + ix]; }
  std::size_t size() const { return pixels.size(); }
};

// One galaxy: x, y, flux, q, theta, width, u, v. Same ordering everywhere
// (catalog files, sample serialization, render input).
using GalaxyComponent = std::array<double, 8>;

struct GalaxyFieldTruth {
  int size = 200;
  double noise_sd = 1.0;
  std::vector<GalaxyComponent> components;
};

// Fixed generation hyperparameters, recorded in the catalog header:
// flux ~ Pareto(10, 1), width ~ Pareto(1.5, 2), u ~ U(0.3, 0.7),
// v ~ U(0.2, 0.8), positions uniform over the image, q ~ U(0.2, 1),
// theta ~ U(0, pi), pixel noise sd 1.
GalaxyFieldTruth generate_galaxy_truth(std::uint64_t seed, int size = 200, int count = 47);

GalaxyImage render_galaxy_truth(const GalaxyFieldTruth& truth);

// Noise-free render plus Gaussian pixel noise.
GalaxyImage generate_galaxy_data(std::uint64_t seed, int size = 200, int count = 47,
                                 GalaxyFieldTruth* truth_out = nullptr);

void write_galaxy_image(const std::filesystem::path& path, const GalaxyImage& image,
                        std::uint64_t seed);
GalaxyImage load_galaxy_image(const std::filesystem::path& path);

void write_galaxy_catalog(const std::filesystem::path& path, const GalaxyFieldTruth& truth,
                          std::uint64_t seed);

}  // namespace tdns::models
