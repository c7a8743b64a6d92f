#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tdns/levels.hpp"
#include "tdns/likelihood_value.hpp"
#include "tdns/rng.hpp"
#include "tdns/sampler.hpp"

namespace tdns::post {

// A completed run loaded back from its levels/samples files.
struct RunData {
  std::vector<Level> levels;
  std::vector<SampleRecord> records;
  std::vector<std::vector<double>> states;  // model part of each row
  std::vector<std::string> state_columns;
  std::vector<std::string> header;  // comment lines from the samples file
  int n_column = -1;                // index of the "n" column, -1 when absent
};

RunData load_run(const std::filesystem::path& run_dir);

// Posterior weighting of the saved samples. Each sample is assigned to the
// deepest level whose threshold its own likelihood beats; the bin between
// consecutive levels carries prior mass X_j - X_{j+1}, shared evenly among
// the bin's samples and multiplied by the sample likelihood.
struct WeightedSamples {
  std::vector<int> assigned_level;
  std::vector<double> log_weight;        // unnormalized log posterior weights
  std::vector<double> posterior;         // normalized, sums to 1
  std::vector<std::uint64_t> bin_counts; // per level
  double log_z = 0.0;
  std::vector<std::string> warnings;     // empty bins that could carry mass
};

WeightedSamples assign_weights(const std::vector<Level>& levels,
                               const std::vector<SampleRecord>& records);

// log Z from the assigned weights, plus a bootstrap standard error from
// resampling the records with replacement.
double log_evidence(const WeightedSamples& weighted);
double log_evidence_stderr(const std::vector<Level>& levels,
                           const std::vector<SampleRecord>& records, int replicates = 100,
                           std::uint64_t seed = 0);

// Kullback-Leibler divergence from prior to posterior, in nats.
double information(const WeightedSamples& weighted,
                   const std::vector<SampleRecord>& records);

// Posterior over the component count, normalized over {0..n_max}.
std::vector<double> posterior_of_n(const WeightedSamples& weighted,
                                   const std::vector<std::vector<double>>& states,
                                   int n_column);

// Systematic resampling proportional to the posterior weights; returns
// indices into the records (a record may repeat).
std::vector<std::size_t> equal_weight_resample(const std::vector<double>& posterior,
                                               std::size_t count, Rng& rng);

struct CurvePoint {
  int level_index = 0;
  double log_x = 0.0;
  double log_l = 0.0;
  bool concave_up = false;  // member of a flagged window of >= 3 levels
};

// log L versus log X per level, with phase-transition flags where the
// discrete second difference of log_l against log_x stays positive across a
// window of at least three levels.
std::vector<CurvePoint> likelihood_curve(const std::vector<Level>& levels);

// Posterior weight accumulated per level bin (the lower-panel curve of the
// diagnostic plot): returns {log_x midpoint, total posterior weight} pairs.
std::vector<std::pair<double, double>> weight_profile(const std::vector<Level>& levels,
                                                      const WeightedSamples& weighted);

// True when the weight profile shows two local maxima separated by a dip to
// at most `dip` of the smaller peak (3-bin moving-average smoothing).
bool weight_profile_bimodal(const std::vector<std::pair<double, double>>& profile,
                            double dip = 0.5);

struct PostprocessResult {
  double log_z = 0.0;
  double log_z_stderr = 0.0;
  double information_nats = 0.0;
  std::vector<double> n_posterior;  // empty for fixed-dimension models
  std::vector<CurvePoint> curve;
};

// Full pipeline over a run directory: writes results.csv, curve.csv,
// curve_samples.csv and resampled.csv next to the inputs.
PostprocessResult postprocess_run(const std::filesystem::path& run_dir,
                                  std::size_t resample_count = 1000,
                                  std::uint64_t seed = 0);

}  // namespace tdns::post
