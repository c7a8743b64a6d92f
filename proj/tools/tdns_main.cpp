#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tdns/bench.hpp"
#include "tdns/errors.hpp"
#include "tdns/models/datasets.hpp"
#include "tdns/models/galaxy_field.hpp"
#include "tdns/models/gaussian_test.hpp"
#include "tdns/models/sinusoid.hpp"
#include "tdns/options.hpp"
#include "tdns/postprocess.hpp"
#include "tdns/sampler.hpp"
#include "tdns/version.hpp"

namespace fs = std::filesystem;
using namespace tdns;

namespace {

struct GenerateArgs {
  std::string kind;
  std::uint64_t seed = 1;
  std::string out;
  int size = 200;
  int count = 47;
};

struct RunArgs {
  std::string model;
  std::string data;
  std::string options_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  bool force = false;
  int threads = 1;
  int n_max = 0;  // 0 keeps the model default
  int gauss_dim = 10;
  double gauss_sigma = 0.01;
};

struct PostArgs {
  std::string out;
  std::size_t count = 1000;
  std::uint64_t seed = 0;
};

struct BenchArgs {
  std::string model;
  std::string data;
  int steps = 20000;
  std::uint64_t seed = 1;
  int n_max = 0;
};

int cmd_generate(const GenerateArgs& args) {
  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  if (args.kind == "sinusoid") {
    const auto data = models::generate_sinusoid_data(args.seed);
    models::write_sinusoid_data(out_dir / "sinusoid_data.txt", data, args.seed, 0.5);
    std::cerr << "wrote " << (out_dir / "sinusoid_data.txt").string() << " (" << data.t.size()
              << " points)\n";
  } else if (args.kind == "galaxyfield") {
    models::GalaxyFieldTruth truth;
    const auto image = models::generate_galaxy_data(args.seed, args.size, args.count, &truth);
    models::write_galaxy_image(out_dir / "galaxy_image.txt", image, args.seed);
    models::write_galaxy_catalog(out_dir / "galaxy_catalog.csv", truth, args.seed);
    std::cerr << "wrote " << (out_dir / "galaxy_image.txt").string() << " (" << image.width
              << "x" << image.height << ", " << truth.components.size() << " galaxies)\n";
  } else {
    throw UsageError("generate: unknown kind '" + args.kind + "'");
  }
  return 0;
}

template <class M>
void run_sampler(M model, const Options& options, const RunArgs& args) {
  Sampler<M> sampler(std::move(model), options);
  sampler.set_output_dir(args.out);
  sampler.set_progress(&std::cerr);
  sampler.set_threads(args.deterministic ? 1 : args.threads);
  sampler.run();
}

int cmd_run(const RunArgs& args) {
  Options options = load_options_file(args.options_path);
  if (args.seed) options.seed = *args.seed;
  if (args.deterministic) options.num_particles = 1;

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  if (!args.force && fs::exists(out_dir / "samples.csv"))
    throw UsageError("output directory already contains a run (use --force to overwrite): " +
                     out_dir.string());

  if (args.model == "sinusoid") {
    if (args.data.empty()) throw UsageError("run: --data is required for the sinusoid model");
    models::SinusoidConfig config;
    if (args.n_max > 0) config.n_max = args.n_max;
    run_sampler(models::SinusoidModel(models::load_sinusoid_data(args.data), config), options,
                args);
  } else if (args.model == "galaxyfield") {
    if (args.data.empty()) throw UsageError("run: --data is required for the galaxyfield model");
    models::GalaxyFieldConfig config;
    if (args.n_max > 0) config.n_max = args.n_max;
    run_sampler(models::GalaxyFieldModel(models::load_galaxy_image(args.data), config), options,
                args);
  } else if (args.model == "gaussian-test") {
    run_sampler(models::GaussianTestModel(args.gauss_dim, args.gauss_sigma), options, args);
  } else {
    throw UsageError("run: unknown model '" + args.model + "'");
  }
  return 0;
}

int cmd_postprocess(const PostArgs& args) {
  const auto result = post::postprocess_run(args.out, args.count, args.seed);
  std::cout << "log_z = " << format_double(result.log_z) << " +- "
            << format_double(result.log_z_stderr) << '\n';
  std::cout << "information_nats = " << format_double(result.information_nats) << '\n';
  if (!result.n_posterior.empty()) {
    std::cout << "posterior over component count:\n";
    for (std::size_t n = 0; n < result.n_posterior.size(); ++n)
      std::cout << "  n = " << n << "  p = " << format_double(result.n_posterior[n]) << '\n';
  }
  bool any_flag = false;
  for (std::size_t j = 0; j < result.curve.size(); ++j) {
    if (!result.curve[j].concave_up) continue;
    const bool start = j == 0 || !result.curve[j - 1].concave_up;
    if (start) {
      std::size_t end = j;
      while (end + 1 < result.curve.size() && result.curve[end + 1].concave_up) ++end;
      std::cout << "concave-up region (possible phase transition): levels " << j << ".." << end
                << ", log_x " << format_double(result.curve[j].log_x) << " to "
                << format_double(result.curve[end].log_x) << '\n';
      any_flag = true;
    }
  }
  if (!any_flag) std::cout << "no concave-up regions flagged\n";
  return 0;
}

int cmd_bench(const BenchArgs& args) {
  BenchReport report;
  if (args.model == "sinusoid") {
    if (args.data.empty()) throw UsageError("bench: --data is required for the sinusoid model");
    const auto data = models::load_sinusoid_data(args.data);
    models::SinusoidConfig config;
    if (args.n_max > 0) config.n_max = args.n_max;
    models::SinusoidModel cached(data, config);
    config.incremental = false;
    models::SinusoidModel uncached(data, config);
    report = run_bench(std::move(cached), std::move(uncached), args.seed, args.steps);
  } else if (args.model == "galaxyfield") {
    if (args.data.empty()) throw UsageError("bench: --data is required for the galaxyfield model");
    const auto image = models::load_galaxy_image(args.data);
    models::GalaxyFieldConfig config;
    if (args.n_max > 0) config.n_max = args.n_max;
    models::GalaxyFieldModel cached(image, config);
    config.incremental = false;
    models::GalaxyFieldModel uncached(image, config);
    report = run_bench(std::move(cached), std::move(uncached), args.seed, args.steps);
  } else {
    throw UsageError("bench: unknown model '" + args.model + "' (sinusoid or galaxyfield)");
  }
  std::cout << "cached:   " << format_double(report.seconds_cached) << " s, "
            << report.accepts_cached << " accepts\n";
  std::cout << "uncached: " << format_double(report.seconds_uncached) << " s, "
            << report.accepts_uncached << " accepts\n";
  std::cout << "speedup ratio = " << format_double(report.ratio()) << '\n';
  std::cout << "identical accept/reject sequences: " << (report.identical_sequences ? "yes" : "no")
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(version_string) +
               " - trans-dimensional inference with diffusive nested sampling"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "simulate a dataset");
  generate->add_option("kind", gen.kind, "sinusoid | galaxyfield")->required();
  generate->add_option("--seed", gen.seed, "generation seed");
  generate->add_option("--out", gen.out, "output directory")->required();
  generate->add_option("--size", gen.size, "galaxy image size in pixels");
  generate->add_option("--count", gen.count, "number of galaxies");

  RunArgs run;
  auto* runcmd = app.add_subcommand("run", "run the sampler");
  runcmd->add_option("--model", run.model, "sinusoid | galaxyfield | gaussian-test")->required();
  runcmd->add_option("--data", run.data, "dataset path");
  runcmd->add_option("--options", run.options_path, "options file")->required();
  runcmd->add_option("--out", run.out, "output directory")->required();
  runcmd->add_option("--seed", run.seed, "override the options-file seed");
  runcmd->add_flag("--deterministic", run.deterministic,
                   "single particle, single thread, reproducible output");
  runcmd->add_flag("--force", run.force, "overwrite an existing run");
  runcmd->add_option("--threads", run.threads, "worker threads");
  runcmd->add_option("--nmax", run.n_max, "override the model's maximum component count");
  runcmd->add_option("--gdim", run.gauss_dim, "gaussian-test dimension");
  runcmd->add_option("--gsigma", run.gauss_sigma, "gaussian-test likelihood width");

  PostArgs postargs;
  auto* postcmd = app.add_subcommand("postprocess", "weight a finished run into results");
  postcmd->add_option("--out", postargs.out, "run directory")->required();
  postcmd->add_option("--count", postargs.count, "equal-weight resample size");
  postcmd->add_option("--seed", postargs.seed, "postprocess seed");

  BenchArgs bench;
  auto* benchcmd = app.add_subcommand("bench", "time incremental caching on vs off");
  benchcmd->add_option("--model", bench.model, "sinusoid | galaxyfield")->required();
  benchcmd->add_option("--data", bench.data, "dataset path");
  benchcmd->add_option("--steps", bench.steps, "proposals per pass");
  benchcmd->add_option("--seed", bench.seed, "workload seed");
  benchcmd->add_option("--nmax", bench.n_max, "override the model's maximum component count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*runcmd) return cmd_run(run);
    if (*postcmd) return cmd_postprocess(postargs);
    if (*benchcmd) return cmd_bench(bench);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
