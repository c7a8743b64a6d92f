#include "tdns/models/datasets.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tdns/csv.hpp"
#include "tdns/errors.hpp"
#include "tdns/models/galaxy_field.hpp"
#include "tdns/rng.hpp"
#include "tdns/version.hpp"

namespace tdns::models {

namespace {
constexpr double two_pi = 6.28318530717958647692;
}

double sinusoid_true_signal(double t) {
  return std::sin(two_pi * t / 30.0) + 0.3 * std::sin(two_pi * t / 2.0 + 1.0);
}

SinusoidData generate_sinusoid_data(std::uint64_t seed, int num_points, double t_lo,
                                    double t_hi, double noise_sd) {
  Rng rng(seed);
  SinusoidData data;
  data.t.resize(num_points);
  data.y.resize(num_points);
  const double step = num_points > 1 ? (t_hi - t_lo) / (num_points - 1) : 0.0;
  for (int i = 0; i < num_points; ++i) {
    data.t[i] = t_lo + step * i;
    data.y[i] = sinusoid_true_signal(data.t[i]) + noise_sd * rng.randn();
  }
  return data;
}

void write_sinusoid_data(const std::filesystem::path& path, const SinusoidData& data,
                         std::uint64_t seed, double noise_sd) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << "# " << version_string << " sinusoid dataset\n";
  out << "# seed = " << seed << "\n";
  out << "# noise_sd = " << format_double(noise_sd) << "\n";
  out << "# columns: t y\n";
  for (std::size_t i = 0; i < data.t.size(); ++i)
    out << format_double(data.t[i]) << ' ' << format_double(data.y[i]) << '\n';
}

SinusoidData load_sinusoid_data(const std::filesystem::path& path) {
  const auto rows = read_matrix(path);
  if (rows.empty()) throw UsageError("empty dataset " + path.string());
  SinusoidData data;
  for (const auto& row : rows) {
    if (row.size() < 2) throw UsageError("dataset rows need two columns: " + path.string());
    data.t.push_back(row[0]);
    data.y.push_back(row[1]);
  }
  return data;
}

GalaxyFieldTruth generate_galaxy_truth(std::uint64_t seed, int size, int count) {
  Rng rng(seed);
  GalaxyFieldTruth truth;
  truth.size = size;
  truth.noise_sd = 1.0;
  truth.components.resize(count);
  for (auto& g : truth.components) {
    g[0] = rng.rand() * size;                                   // x
    g[1] = rng.rand() * size;                                   // y
    g[2] = 10.0 * std::exp(-std::log1p(-rng.rand()) / 1.0);     // flux ~ Pareto(10, 1)
    g[3] = 0.2 + 0.8 * rng.rand();                              // q
    g[4] = 3.14159265358979323846 * rng.rand();                 // theta
    g[5] = 1.5 * std::exp(-std::log1p(-rng.rand()) / 2.0);      // width ~ Pareto(1.5, 2)
    g[6] = 0.3 + 0.4 * rng.rand();                              // u
    g[7] = 0.2 + 0.6 * rng.rand();                              // v
  }
  return truth;
}

GalaxyImage render_galaxy_truth(const GalaxyFieldTruth& truth) {
  GalaxyImage image;
  image.width = truth.size;
  image.height = truth.size;
  image.pixels.assign(static_cast<std::size_t>(truth.size) * truth.size, 0.0);
  for (const auto& g : truth.components) render_galaxy(g, 1.0, image);
  return image;
}

GalaxyImage generate_galaxy_data(std::uint64_t seed, int size, int count,
                                 GalaxyFieldTruth* truth_out) {
  GalaxyFieldTruth truth = generate_galaxy_truth(seed, size, count);
  GalaxyImage image = render_galaxy_truth(truth);
  Rng rng(substream_seed(seed, 1));  // noise stream distinct from the catalog stream
  for (auto& p : image.pixels) p += truth.noise_sd * rng.randn();
  if (truth_out) *truth_out = truth;
  return image;
}

void write_galaxy_image(const std::filesystem::path& path, const GalaxyImage& image,
                        std::uint64_t seed) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write " + path.string());
  out << "# " << version_string << " galaxy field image\n";
  out << "# seed = " << seed << "\n";
  out << "# rows = " << image.height << " cols = " << image.width << "\n";
  char buf[40];
  for (int iy = 0; iy < image.height; ++iy) {
    for (int ix = 0; ix < image.width; ++ix) {
      if (ix) out << ' ';
      std::snprintf(buf, sizeof buf, "%.12g", image.at(ix, iy));
      out << buf;
    }
    out << '\n';
  }
}

GalaxyImage load_galaxy_image(const std::filesystem::path& path) {
  const auto rows = read_matrix(path);
  if (rows.empty()) throw UsageError("empty image " + path.string());
  GalaxyImage image;
  image.height = static_cast<int>(rows.size());
  image.width = static_cast<int>(rows[0].size());
  image.pixels.reserve(static_cast<std::size_t>(image.width) * image.height);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != image.width)
      throw UsageError("ragged image rows in " + path.string());
    image.pixels.insert(image.pixels.end(), row.begin(), row.end());
  }
  return image;
}

void write_galaxy_catalog(const std::filesystem::path& path, const GalaxyFieldTruth& truth,
                          std::uint64_t seed) {
  CsvWriter out(path);
  out.comment(std::string(version_string) + " galaxy field ground truth");
  out.comment("seed = " + std::to_string(seed));
  out.comment("image_size = " + std::to_string(truth.size));
  out.comment("noise_sd = " + format_double(truth.noise_sd));
  out.comment("generation hyperparameters: flux ~ Pareto(f_min=10, a_f=1), "
              "width ~ Pareto(w_min=1.5, a_w=2), u ~ U(0.3,0.7), v ~ U(0.2,0.8)");
  out.columns({"x", "y", "flux", "q", "theta", "width", "u", "v"});
  for (const auto& g : truth.components) out.row(g);
}

}  // namespace tdns::models
