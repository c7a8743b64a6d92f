#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "support/stats.hpp"
#include "tdns/errors.hpp"
#include "tdns/levels.hpp"
#include "tdns/options.hpp"
#include "tdns/rng.hpp"

using namespace tdns;

TEST_CASE("likelihood values are totally ordered") {
  const LikelihoodValue a{-5.0, 0.2}, b{-5.0, 0.7}, c{-4.0, 0.0};
  CHECK(b > a);
  CHECK(c > b);
  CHECK(c > a);
  CHECK_FALSE(a > a);
  CHECK(a < b);
  const LikelihoodValue level0;
  CHECK(a > level0);  // anything finite beats (-inf, 0)
}

TEST_CASE("level_weights: uniform when complete") {
  const auto w = level_weights(4, 10.0, true);
  for (const double wj : w) CHECK(wj == doctest::Approx(0.25));
  CHECK(level_weights(1, 10.0, true) == std::vector<double>{1.0});
  CHECK(level_weights(1, 10.0, false) == std::vector<double>{1.0});
}

TEST_CASE("level_weights: exponential backbone while building") {
  // direct evaluation of exp((j - j_max)/lambda), normalized to sum 1
  const auto w = level_weights(4, 10.0, false);
  double total = 0.0;
  for (int j = 0; j < 4; ++j) total += std::exp((j - 3) / 10.0);
  for (int j = 0; j < 4; ++j)
    CHECK(w[j] == doctest::Approx(std::exp((j - 3) / 10.0) / total).epsilon(1e-12));
  // consecutive ratios are e^{1/lambda}
  for (int j = 0; j + 1 < 4; ++j)
    CHECK(w[j + 1] / w[j] == doctest::Approx(std::exp(0.1)).epsilon(1e-12));
  CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("create_level picks the (1 - 1/e) quantile") {
  // sort-and-index oracle on an explicit list: values 1..100 shuffled;
  // the 64th smallest (index floor(0.6321 * 100) = 63) is 64
  std::vector<LikelihoodValue> buffer;
  for (int i = 1; i <= 100; ++i) buffer.push_back({static_cast<double>(i), 0.5});
  Rng rng(3);
  for (std::size_t i = buffer.size(); i > 1; --i)
    std::swap(buffer[i - 1], buffer[rng.rand_int(static_cast<int>(i))]);

  const LikelihoodValue threshold = create_level(buffer);
  CHECK(threshold.log_l == doctest::Approx(64.0));
  // buffer pruned to the 36 entries strictly above
  CHECK(buffer.size() == 36);
  for (const auto& v : buffer) CHECK(v > threshold);
}

TEST_CASE("create_level handles plateaus through tiebreaks") {
  std::vector<LikelihoodValue> buffer;
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) buffer.push_back({1.0, rng.rand()});
  auto sorted = buffer;
  std::sort(sorted.begin(), sorted.end(),
            [](const LikelihoodValue& a, const LikelihoodValue& b) { return a < b; });
  const LikelihoodValue expected = sorted[static_cast<std::size_t>((1.0 - std::exp(-1.0)) * 1000)];

  const LikelihoodValue threshold = create_level(buffer);
  CHECK(threshold.log_l == 1.0);
  CHECK(threshold.tiebreak == doctest::Approx(expected.tiebreak));
  for (const auto& v : buffer) CHECK(v.tiebreak > threshold.tiebreak);
}

TEST_CASE("refine_log_x: regularizer dominates with no traffic") {
  std::vector<Level> levels(5);
  for (int j = 0; j < 5; ++j) levels[j].threshold = {static_cast<double>(j), 0.0};
  refine_log_x(levels);
  for (int j = 0; j < 5; ++j) CHECK(levels[j].log_x == doctest::Approx(-j).epsilon(1e-12));
}

TEST_CASE("refine_log_x: direct evaluation with traffic") {
  std::vector<Level> levels(2);
  levels[0].visits = 1000;
  levels[0].exceeds = 368;
  refine_log_x(levels);
  const double expected = std::log((368.0 + 100.0 * std::exp(-1.0)) / 1100.0);
  CHECK(levels[1].log_x == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-0.99970).epsilon(1e-4));
}

TEST_CASE("refine_log_x keeps log_x strictly decreasing") {
  Rng rng(7);
  std::vector<Level> levels(20);
  for (auto& lev : levels) {
    lev.visits = rng.rand_int(100000);
    lev.exceeds = static_cast<std::uint64_t>(lev.visits * rng.rand());
  }
  refine_log_x(levels);
  CHECK(levels[0].log_x == 0.0);
  for (std::size_t j = 0; j + 1 < levels.size(); ++j)
    CHECK(levels[j + 1].log_x < levels[j].log_x);
}

TEST_CASE("index move ratio: unit spacing always accepts upward") {
  // uniform weights, log_x spacing exactly -1, beta = 0: the ratio for
  // j -> j+1 is exp(+1) >= 1
  std::vector<Level> levels(10);
  for (int j = 0; j < 10; ++j) {
    levels[j].threshold = {static_cast<double>(j), 0.0};
    levels[j].log_x = -static_cast<double>(j);
  }
  const auto weights = level_weights(10, 10.0, true);
  for (int j = 0; j + 1 < 10; ++j)
    CHECK(index_move_log_ratio(j, j + 1, levels, weights, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  CHECK(index_move_log_ratio(3, 3, levels, weights, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("index move enforcement factor favours under-visited levels") {
  std::vector<Level> levels(3);
  for (int j = 0; j < 3; ++j) levels[j].log_x = 0.0;
  levels[0].visits = 10000;
  levels[2].visits = 0;
  const auto weights = level_weights(3, 10.0, true);
  const double toward_fresh = index_move_log_ratio(0, 2, levels, weights, 10.0);
  const double toward_stale = index_move_log_ratio(2, 0, levels, weights, 10.0);
  CHECK(toward_fresh > 0.0);
  CHECK(toward_stale < 0.0);
  CHECK(toward_fresh == doctest::Approx(10.0 * std::log(11000.0 / 1000.0)).epsilon(1e-12));
}

TEST_CASE("index move rejects thresholds the particle cannot satisfy") {
  std::vector<Level> levels(5);
  for (int j = 0; j < 5; ++j) {
    levels[j].threshold = {static_cast<double>(j), 0.0};
    levels[j].log_x = -static_cast<double>(j);
  }
  const auto weights = level_weights(5, 10.0, true);
  Rng rng(13);
  const LikelihoodValue low{0.5, 0.5};  // only satisfies level 0's threshold
  for (int i = 0; i < 1000; ++i) CHECK(index_move(0, low, levels, weights, 0.0, rng) == 0);
}

TEST_CASE("self-consistent occupancy is uniform once refinement converges") {
  // a particle above every threshold: visits make exceeds == visits, so
  // refinement drives all log_x together and occupancy approaches the
  // uniform weights; chi-square against the exact uniform oracle
  std::vector<Level> levels(8);
  for (int j = 0; j < 8; ++j) {
    levels[j].threshold = {static_cast<double>(j), 0.0};
    levels[j].log_x = -static_cast<double>(j);
  }
  const auto weights = level_weights(8, 10.0, true);
  const LikelihoodValue high{100.0, 0.5};
  Rng rng(17);
  int j = 0;

  // burn in while refinement converges
  for (int i = 0; i < 200000; ++i) {
    j = index_move(j, high, levels, weights, 0.0, rng);
    if (j + 1 < 8) {
      levels[j].visits += 1;
      levels[j].exceeds += 1;
    }
    if (i % 100 == 0) refine_log_x(levels);
  }
  std::vector<std::uint64_t> counts(8, 0);
  for (int i = 0; i < 1000000; ++i) {
    j = index_move(j, high, levels, weights, 0.0, rng);
    if (j + 1 < 8) {
      levels[j].visits += 1;
      levels[j].exceeds += 1;
    }
    if (i % 100 == 0) refine_log_x(levels);
    if (i % 25 == 0) ++counts[j];
  }
  const double stat = teststats::chi_square_uniform(counts);
  CHECK(teststats::chi_square_pvalue(stat, 7) > 0.001);
}

TEST_CASE("options files parse, echo, and reject unknown keys") {
  const std::string text =
      "# a comment\n"
      "num_particles = 2\n"
      "new_level_interval = 500\n"
      "save_interval = 50   # trailing comment\n"
      "max_num_levels = 12\n"
      "lambda = 5.5\n"
      "beta = 0\n"
      "max_num_saves = 100\n"
      "seed = 99\n";
  const Options opts = parse_options_text(text);
  CHECK(opts.num_particles == 2);
  CHECK(opts.new_level_interval == 500);
  CHECK(opts.save_interval == 50);
  CHECK(opts.max_num_levels == 12);
  CHECK(opts.lambda == doctest::Approx(5.5));
  CHECK(opts.beta == 0.0);
  CHECK(opts.max_num_saves == 100);
  CHECK(opts.seed == 99);

  // the echo parses back to the same values
  const Options echoed = parse_options_text(opts.format());
  CHECK(echoed.num_particles == opts.num_particles);
  CHECK(echoed.seed == opts.seed);
  CHECK(echoed.lambda == opts.lambda);

  CHECK_THROWS_AS(parse_options_text("bogus_key = 3\n"), UsageError);
  CHECK_THROWS_AS(parse_options_text("num_particles = 0\n"), UsageError);
  CHECK_THROWS_AS(parse_options_text("lambda = -1\n"), UsageError);
  CHECK_THROWS_AS(parse_options_text("seed 3\n"), UsageError);
}
