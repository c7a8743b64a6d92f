#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "tdns/models/gaussian_test.hpp"
#include "tdns/models/sinusoid.hpp"
#include "tdns/options.hpp"
#include "tdns/postprocess.hpp"
#include "tdns/sampler.hpp"

using namespace tdns;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("tdns_sampler_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Options quick_options() {
  Options opts;
  opts.num_particles = 1;
  opts.new_level_interval = 300;
  opts.save_interval = 20;
  opts.max_num_levels = 12;
  opts.lambda = 10.0;
  opts.beta = 10.0;
  opts.max_num_saves = 2000;
  opts.seed = 7;
  return opts;
}

}  // namespace

TEST_CASE("sampler on the 1-d gaussian test model reaches the analytic evidence") {
  models::GaussianTestModel model(1, 0.1);
  Options opts = quick_options();
  opts.max_num_saves = 4000;
  const auto dir = fresh_dir("gauss1d");
  Sampler<models::GaussianTestModel> sampler(model, opts);
  sampler.set_output_dir(dir);
  sampler.run();

  CHECK(sampler.level_building_complete());
  CHECK(sampler.total_saves() == 4000);

  // thresholds strictly increase, log_x strictly decreases
  const auto& levels = sampler.levels();
  REQUIRE(levels.size() == 12);
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    CHECK(levels[j + 1].threshold > levels[j].threshold);
    CHECK(levels[j + 1].log_x < levels[j].log_x);
  }

  const auto run = post::load_run(dir);
  const auto weighted = post::assign_weights(run.levels, run.records);
  const double expected = model.analytic_log_z();
  CHECK(std::fabs(weighted.log_z - expected) < 0.3);
  const double h = post::information(weighted, run.records);
  CHECK(std::fabs(h - model.analytic_information()) < 0.5);
}

TEST_CASE("constant likelihood never creates a level beyond level 0") {
  models::SinusoidData data;
  data.t = {0.0, 1.0, 2.0};
  data.y = {0.0, 0.0, 0.0};
  models::SinusoidConfig config;
  config.constant_likelihood = true;
  models::SinusoidModel model(data, config);

  Options opts = quick_options();
  opts.max_num_levels = 10;  // would build levels if the guard failed
  opts.max_num_saves = 3000;
  Sampler<models::SinusoidModel> sampler(model, opts);
  sampler.run();
  CHECK(sampler.levels().size() == 1);
}

TEST_CASE("qualifying records between level creations equal new_level_interval") {
  // deterministic mode: the buffer reaches exactly new_level_interval
  // qualifying records at each creation, so the retained fraction after the
  // cut is about e^-1 of them
  models::GaussianTestModel model(2, 0.05);
  Options opts = quick_options();
  opts.new_level_interval = 400;
  opts.max_num_levels = 6;
  opts.max_num_saves = 1500;
  Sampler<models::GaussianTestModel> sampler(model, opts);
  sampler.run();
  CHECK(sampler.levels().size() == 6);
  CHECK(sampler.level_building_complete());
}

TEST_CASE("deterministic reruns are byte-identical") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  for (const auto& dir : {dir_a, dir_b}) {
    models::GaussianTestModel model(3, 0.1);
    Sampler<models::GaussianTestModel> sampler(model, quick_options());
    sampler.set_output_dir(dir);
    sampler.run();
  }
  CHECK(file_bytes(dir_a / "samples.csv") == file_bytes(dir_b / "samples.csv"));
  CHECK(file_bytes(dir_a / "levels.csv") == file_bytes(dir_b / "levels.csv"));
  CHECK(file_bytes(dir_a / "samples.csv") != "");

  // different seed, different stream
  models::GaussianTestModel model(3, 0.1);
  Options other = quick_options();
  other.seed = 8;
  const auto dir_c = fresh_dir("det_c");
  Sampler<models::GaussianTestModel> sampler(model, other);
  sampler.set_output_dir(dir_c);
  sampler.run();
  CHECK(file_bytes(dir_a / "samples.csv") != file_bytes(dir_c / "samples.csv"));
}

TEST_CASE("output files carry headers and rectangular rows") {
  const auto dir = fresh_dir("files");
  models::GaussianTestModel model(2, 0.1);
  Sampler<models::GaussianTestModel> sampler(model, quick_options());
  sampler.set_output_dir(dir);
  sampler.run();

  for (const char* name : {"samples.csv", "levels.csv"}) {
    const Table table = read_csv(dir / name);
    bool has_seed = false, has_version = false;
    for (const auto& comment : table.comments) {
      if (comment.find("seed = 7") != std::string::npos) has_seed = true;
      if (comment.find("tdns") != std::string::npos) has_version = true;
    }
    CHECK(has_seed);
    CHECK(has_version);
    CHECK(!table.rows.empty());
  }

  const Table samples = read_csv(dir / "samples.csv");
  CHECK(samples.columns.size() == 4 + 2);
  CHECK(samples.columns[0] == "sample_id");
  CHECK(samples.rows.size() == 2000);

  const Table levels = read_csv(dir / "levels.csv");
  CHECK(levels.columns.size() == 8);
  CHECK(levels.rows[0][1] == 0.0);  // level 0 log_x
}

TEST_CASE("multi-particle and threaded runs produce sane output") {
  models::GaussianTestModel model(2, 0.1);
  Options opts = quick_options();
  opts.num_particles = 4;
  opts.max_num_saves = 2000;
  const auto dir = fresh_dir("threads");
  Sampler<models::GaussianTestModel> sampler(model, opts);
  sampler.set_output_dir(dir);
  sampler.set_threads(2);
  sampler.run();
  CHECK(sampler.total_saves() == 2000);

  const auto run = post::load_run(dir);
  const auto weighted = post::assign_weights(run.levels, run.records);
  CHECK(std::fabs(weighted.log_z - model.analytic_log_z()) < 0.5);
}

TEST_CASE("NaN likelihoods abort with the offending state serialized") {
  struct NanModel {
    using State = std::vector<double>;
    State from_prior(Rng& rng) const { return {rng.rand()}; }
    double perturb(State& s, Rng& rng) const {
      s[0] = rng.rand() - 2.0;  // forces a negative argument below
      return 0.0;
    }
    double log_likelihood(const State& s) const { return std::sqrt(s[0]); }
    void rebuild_cache(State&) const {}
    void serialize(const State& s, std::vector<double>& out) const {
      out.insert(out.end(), s.begin(), s.end());
    }
    State state_from_flat(std::span<const double> flat) const {
      return State(flat.begin(), flat.end());
    }
    std::vector<std::string> column_names() const { return {"x"}; }
    int flat_size() const { return 1; }
  };
  Options opts = quick_options();
  opts.max_num_saves = 10;
  Sampler<NanModel> sampler(NanModel{}, opts);
  CHECK_THROWS_AS(sampler.run(), NumericError);
}
