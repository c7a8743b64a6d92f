#include "tdns/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdns/csv.hpp"
#include "tdns/errors.hpp"

namespace tdns::post {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& xs) {
  double m = neg_inf;
  for (double x : xs) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// log(X_j - X_{j+1}) for bin j; the top bin keeps the whole remaining mass.
std::vector<double> bin_log_mass(const std::vector<Level>& levels) {
  const std::size_t n = levels.size();
  std::vector<double> log_mass(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double d = levels[j + 1].log_x - levels[j].log_x;  // < 0
    log_mass[j] = levels[j].log_x + std::log(-std::expm1(d));
  }
  log_mass[n - 1] = levels[n - 1].log_x;
  return log_mass;
}

int deepest_level_beaten(const std::vector<Level>& levels, const LikelihoodValue& v) {
  // thresholds increase with index; find the largest j with v > threshold[j]
  int lo = 0, hi = static_cast<int>(levels.size()) - 1;
  if (!(v > levels[0].threshold)) return 0;  // level 0 is (-inf, 0); only equal values land here
  while (lo < hi) {
    const int mid = (lo + hi + 1) / 2;
    if (v > levels[mid].threshold)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

RunData load_run(const std::filesystem::path& run_dir) {
  const Table levels_table = read_csv(run_dir / "levels.csv");
  const Table samples_table = read_csv(run_dir / "samples.csv");

  RunData run;
  run.header = samples_table.comments;

  for (const auto& row : levels_table.rows) {
    if (row.size() < 8) throw UsageError("levels.csv row too short");
    Level lev;
    lev.log_x = row[1];
    lev.threshold.log_l = row[2];
    lev.threshold.tiebreak = row[3];
    lev.visits = static_cast<std::uint64_t>(row[4]);
    lev.exceeds = static_cast<std::uint64_t>(row[5]);
    lev.accepts = static_cast<std::uint64_t>(row[6]);
    lev.tries = static_cast<std::uint64_t>(row[7]);
    run.levels.push_back(lev);
  }
  if (run.levels.empty()) throw UsageError("levels.csv contains no levels");

  if (samples_table.columns.size() < 4 || samples_table.columns[0] != "sample_id")
    throw UsageError("samples.csv does not look like a run output");
  run.state_columns.assign(samples_table.columns.begin() + 4, samples_table.columns.end());
  for (std::size_t i = 0; i < run.state_columns.size(); ++i)
    if (run.state_columns[i] == "n") run.n_column = static_cast<int>(i);

  run.records.reserve(samples_table.rows.size());
  run.states.reserve(samples_table.rows.size());
  for (const auto& row : samples_table.rows) {
    SampleRecord rec;
    rec.sample_id = static_cast<std::uint64_t>(row[0]);
    rec.level_index = static_cast<int>(row[1]);
    rec.value.log_l = row[2];
    rec.value.tiebreak = row[3];
    run.records.push_back(rec);
    run.states.emplace_back(row.begin() + 4, row.end());
  }
  if (run.records.empty()) throw UsageError("samples.csv contains no samples (run too short)");
  return run;
}

WeightedSamples assign_weights(const std::vector<Level>& levels,
                               const std::vector<SampleRecord>& records) {
  if (records.empty()) throw UsageError("no samples to weight (run too short)");
  const std::size_t num_levels = levels.size();
  WeightedSamples out;
  out.assigned_level.resize(records.size());
  out.bin_counts.assign(num_levels, 0);

  for (std::size_t s = 0; s < records.size(); ++s) {
    const int j = deepest_level_beaten(levels, records[s].value);
    out.assigned_level[s] = j;
    out.bin_counts[j] += 1;
  }

  const std::vector<double> log_mass = bin_log_mass(levels);
  out.log_weight.resize(records.size());
  for (std::size_t s = 0; s < records.size(); ++s) {
    const int j = out.assigned_level[s];
    out.log_weight[s] = log_mass[j] - std::log(static_cast<double>(out.bin_counts[j])) +
                        records[s].value.log_l;
  }
  out.log_z = log_sum_exp(out.log_weight);

  out.posterior.resize(records.size());
  for (std::size_t s = 0; s < records.size(); ++s)
    out.posterior[s] = std::exp(out.log_weight[s] - out.log_z);

  // empty bins contribute no mass; warn when one could have mattered
  const double floor_log = out.log_z + std::log(1e-3);
  for (std::size_t j = 0; j < num_levels; ++j) {
    if (out.bin_counts[j] > 0) continue;
    if (j + 1 < num_levels) {
      const double bound = log_mass[j] + levels[j + 1].threshold.log_l;
      if (bound > floor_log)
        out.warnings.push_back("empty bin " + std::to_string(j) +
                               " could carry posterior mass (bound " + format_double(bound) +
                               " vs log Z " + format_double(out.log_z) + ")");
    } else {
      out.warnings.push_back("top bin empty: prior mass exp(" +
                             format_double(levels[j].log_x) + ") unrepresented");
    }
  }
  return out;
}

double log_evidence(const WeightedSamples& weighted) { return weighted.log_z; }

double log_evidence_stderr(const std::vector<Level>& levels,
                           const std::vector<SampleRecord>& records, int replicates,
                           std::uint64_t seed) {
  Rng rng(substream_seed(seed, 0xb007));
  std::vector<double> z(replicates);
  std::vector<SampleRecord> resampled(records.size());
  for (int r = 0; r < replicates; ++r) {
    for (auto& rec : resampled) rec = records[rng.rand_int(static_cast<int>(records.size()))];
    z[r] = assign_weights(levels, resampled).log_z;
  }
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / replicates;
  double var = 0.0;
  for (double zi : z) var += (zi - mean) * (zi - mean);
  var /= std::max(1, replicates - 1);
  return std::sqrt(var);
}

double information(const WeightedSamples& weighted,
                   const std::vector<SampleRecord>& records) {
  double h = 0.0;
  for (std::size_t s = 0; s < records.size(); ++s) {
    if (weighted.posterior[s] > 0.0)
      h += weighted.posterior[s] * (records[s].value.log_l - weighted.log_z);
  }
  return h;
}

std::vector<double> posterior_of_n(const WeightedSamples& weighted,
                                   const std::vector<std::vector<double>>& states,
                                   int n_column) {
  if (n_column < 0) return {};
  int n_top = 0;
  for (const auto& st : states)
    n_top = std::max(n_top, static_cast<int>(st[n_column]));
  std::vector<double> hist(static_cast<std::size_t>(n_top) + 1, 0.0);
  for (std::size_t s = 0; s < states.size(); ++s)
    hist[static_cast<int>(states[s][n_column])] += weighted.posterior[s];
  double total = std::accumulate(hist.begin(), hist.end(), 0.0);
  if (total > 0.0)
    for (auto& h : hist) h /= total;
  return hist;
}

std::vector<std::size_t> equal_weight_resample(const std::vector<double>& posterior,
                                               std::size_t count, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (posterior.empty() || count == 0) return out;
  double total = std::accumulate(posterior.begin(), posterior.end(), 0.0);
  if (total <= 0.0) return out;
  const double offset = rng.rand();
  double cum = 0.0;
  std::size_t s = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double target = total * (offset + static_cast<double>(i)) / static_cast<double>(count);
    while (s + 1 < posterior.size() && cum + posterior[s] <= target) {
      cum += posterior[s];
      ++s;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<CurvePoint> likelihood_curve(const std::vector<Level>& levels) {
  const int n = static_cast<int>(levels.size());
  std::vector<CurvePoint> curve(n);
  for (int j = 0; j < n; ++j)
    curve[j] = CurvePoint{j, levels[j].log_x, levels[j].threshold.log_l, false};

  if (n < 4) return curve;  // need level 0 excluded plus a 3-wide stencil

  auto slope = [&](int a, int b) {
    return (levels[b].threshold.log_l - levels[a].threshold.log_l) /
           (levels[b].log_x - levels[a].log_x);
  };
  std::vector<bool> raw(n, false);
  for (int j = 2; j + 1 < n; ++j) {
    const double s_prev = slope(j - 1, j);
    const double s_next = slope(j, j + 1);
    const double half_span = 0.5 * (levels[j + 1].log_x - levels[j - 1].log_x);
    raw[j] = ((s_next - s_prev) / half_span) > 0.0;
  }
  // a run of >= 3 consecutive concave-up levels marks a phase transition
  int run_start = -1;
  for (int j = 2; j <= n; ++j) {
    const bool on = j < n && raw[j];
    if (on && run_start < 0) run_start = j;
    if (!on && run_start >= 0) {
      if (j - run_start >= 3)
        for (int k = run_start; k < j; ++k) curve[k].concave_up = true;
      run_start = -1;
    }
  }
  return curve;
}

std::vector<std::pair<double, double>> weight_profile(const std::vector<Level>& levels,
                                                      const WeightedSamples& weighted) {
  const std::size_t n = levels.size();
  std::vector<double> mass(n, 0.0);
  for (std::size_t s = 0; s < weighted.posterior.size(); ++s)
    mass[weighted.assigned_level[s]] += weighted.posterior[s];
  std::vector<std::pair<double, double>> profile(n);
  for (std::size_t j = 0; j < n; ++j) {
    double mid;
    if (j + 1 < n) {
      // log((X_j + X_{j+1}) / 2), evaluated in log space
      mid = levels[j].log_x +
            std::log1p(std::exp(levels[j + 1].log_x - levels[j].log_x)) - std::log(2.0);
    } else {
      mid = levels[j].log_x - std::log(2.0);
    }
    profile[j] = {mid, mass[j]};
  }
  return profile;
}

bool weight_profile_bimodal(const std::vector<std::pair<double, double>>& profile,
                            double dip) {
  const int n = static_cast<int>(profile.size());
  if (n < 3) return false;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    int cnt = 0;
    for (int k = std::max(0, i - 1); k <= std::min(n - 1, i + 1); ++k, ++cnt)
      sum += profile[k].second;
    w[i] = sum / cnt;
  }
  std::vector<int> maxima;
  for (int i = 1; i + 1 < n; ++i)
    if (w[i] > w[i - 1] && w[i] >= w[i + 1] && w[i] > 0.0) maxima.push_back(i);
  for (std::size_t a = 0; a < maxima.size(); ++a) {
    for (std::size_t b = a + 1; b < maxima.size(); ++b) {
      const int i = maxima[a], k = maxima[b];
      double valley = w[i];
      for (int j = i + 1; j < k; ++j) valley = std::min(valley, w[j]);
      if (valley <= dip * std::min(w[i], w[k])) return true;
    }
  }
  return false;
}

namespace {

void write_results_file(const std::filesystem::path& run_dir, const RunData& run,
                        const PostprocessResult& result,
                        const std::vector<std::string>& warnings) {
  CsvWriter out(run_dir / "results.csv");
  out.comment(version_string);
  for (const auto& line : run.header) out.comment(line);
  for (const auto& warning : warnings) out.comment("warning: " + warning);
  out.columns({"quantity", "value"});
  out.raw_row("log_z," + format_double(result.log_z));
  out.raw_row("log_z_stderr," + format_double(result.log_z_stderr));
  out.raw_row("information_nats," + format_double(result.information_nats));
  for (std::size_t n = 0; n < result.n_posterior.size(); ++n)
    out.raw_row("posterior_n_" + std::to_string(n) + "," + format_double(result.n_posterior[n]));
}

void write_curve_file(const std::filesystem::path& run_dir, const RunData& run,
                      const std::vector<CurvePoint>& curve) {
  CsvWriter out(run_dir / "curve.csv");
  out.comment(version_string);
  for (const auto& line : run.header) out.comment(line);
  out.columns({"level_index", "log_x", "log_l", "flag_concave_up"});
  for (const auto& p : curve) {
    const double row[4] = {static_cast<double>(p.level_index), p.log_x, p.log_l,
                           p.concave_up ? 1.0 : 0.0};
    out.row(row);
  }
}

// per-sample scatter: each sample placed inside its bin by likelihood rank
void write_curve_samples_file(const std::filesystem::path& run_dir, const RunData& run,
                              const WeightedSamples& weighted) {
  CsvWriter out(run_dir / "curve_samples.csv");
  out.comment(version_string);
  for (const auto& line : run.header) out.comment(line);
  out.columns({"sample_id", "log_x", "log_l", "posterior_weight"});

  const std::vector<double> log_mass = bin_log_mass(run.levels);
  std::vector<std::vector<std::size_t>> by_bin(run.levels.size());
  for (std::size_t s = 0; s < run.records.size(); ++s)
    by_bin[weighted.assigned_level[s]].push_back(s);
  for (std::size_t j = 0; j < by_bin.size(); ++j) {
    auto& members = by_bin[j];
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return run.records[a].value < run.records[b].value;
    });
    const double log_ratio = log_mass[j] - run.levels[j].log_x;  // <= 0
    for (std::size_t r = 0; r < members.size(); ++r) {
      const std::size_t s = members[r];
      const double frac = (static_cast<double>(r) + 0.5) / static_cast<double>(members.size());
      const double log_x_s =
          run.levels[j].log_x + std::log1p(-std::exp(log_ratio) * frac);
      const double row[4] = {static_cast<double>(run.records[s].sample_id), log_x_s,
                             run.records[s].value.log_l, weighted.posterior[s]};
      out.row(row);
    }
  }
}

void write_resampled_file(const std::filesystem::path& run_dir, const RunData& run,
                          const std::vector<std::size_t>& picks) {
  CsvWriter out(run_dir / "resampled.csv");
  out.comment(version_string);
  for (const auto& line : run.header) out.comment(line);
  std::vector<std::string> cols{"sample_id", "level_index", "log_l", "tiebreak"};
  cols.insert(cols.end(), run.state_columns.begin(), run.state_columns.end());
  out.columns(cols);
  std::vector<double> row;
  for (const std::size_t s : picks) {
    row.clear();
    row.push_back(static_cast<double>(run.records[s].sample_id));
    row.push_back(static_cast<double>(run.records[s].level_index));
    row.push_back(run.records[s].value.log_l);
    row.push_back(run.records[s].value.tiebreak);
    row.insert(row.end(), run.states[s].begin(), run.states[s].end());
    out.row(row);
  }
}

}  // namespace

PostprocessResult postprocess_run(const std::filesystem::path& run_dir,
                                  std::size_t resample_count, std::uint64_t seed) {
  const RunData run = load_run(run_dir);
  const WeightedSamples weighted = assign_weights(run.levels, run.records);

  PostprocessResult result;
  result.log_z = log_evidence(weighted);
  result.log_z_stderr = log_evidence_stderr(run.levels, run.records, 100, seed);
  result.information_nats = information(weighted, run.records);
  result.n_posterior = posterior_of_n(weighted, run.states, run.n_column);
  result.curve = likelihood_curve(run.levels);

  write_results_file(run_dir, run, result, weighted.warnings);
  write_curve_file(run_dir, run, result.curve);
  write_curve_samples_file(run_dir, run, weighted);

  Rng rng(substream_seed(seed, 0x5eed));
  const auto picks = equal_weight_resample(weighted.posterior, resample_count, rng);
  write_resampled_file(run_dir, run, picks);

  return result;
}

}  // namespace tdns::post
