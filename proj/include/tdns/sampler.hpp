#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tdns/csv.hpp"
#include "tdns/errors.hpp"
#include "tdns/levels.hpp"
#include "tdns/likelihood_value.hpp"
#include "tdns/options.hpp"
#include "tdns/rng.hpp"
#include "tdns/version.hpp"

namespace tdns {

struct SampleRecord {
  std::uint64_t sample_id = 0;
  int level_index = 0;
  LikelihoodValue value;
};

// The diffusive nested sampling engine. Walkers explore a weighted mixture of
// constrained priors indexed by an auxiliary level; new levels are cut from
// the stream of likelihood values that beat the current top threshold until
// the requested number exists, at which point the level weights switch to
// uniform. Saved samples become posterior quantities in the postprocess
// module.
//
// Model requirements (a copyable State plus):
//   State from_prior(Rng&) const
//   double perturb(State&, Rng&) const            -> log Hastings factor
//   double log_likelihood(const State&) const
//   void rebuild_cache(State&) const
//   void serialize(const State&, std::vector<double>&) const
//   State state_from_flat(std::span<const double>) const
//   std::vector<std::string> column_names() const
//   int flat_size() const
template <class M>
class Sampler {
 public:
  using State = typename M::State;
  using SaveHook = std::function<void(const SampleRecord&, std::span<const double>)>;

  Sampler(M model, Options options) : model_(std::move(model)), options_(options) {
    options_.validate();
  }

  void set_output_dir(const std::filesystem::path& dir) { output_dir_ = dir; }
  void set_save_hook(SaveHook hook) { save_hook_ = std::move(hook); }
  void set_progress(std::ostream* out) { progress_ = out; }
  void set_threads(int threads) { threads_ = threads < 1 ? 1 : threads; }

  void run() {
    initialize();
    if (threads_ > 1 && options_.num_particles > 1)
      run_threaded();
    else
      run_serial();
    refine_log_x(levels_);
    write_levels_file();
    if (samples_out_.is_open()) samples_out_.flush();
    progress_line(true);
  }

  const std::vector<Level>& levels() const { return levels_; }
  std::uint64_t total_steps() const { return steps_; }
  std::uint64_t total_saves() const { return saves_; }
  bool level_building_complete() const { return !building_; }

  // accept fraction of particle moves over a closed band of level indices
  double acceptance_fraction(int lo, int hi) const {
    std::uint64_t acc = 0, tries = 0;
    for (int j = std::max(lo, 0); j <= hi && j < static_cast<int>(levels_.size()); ++j) {
      acc += levels_[j].accepts;
      tries += levels_[j].tries;
    }
    return tries ? static_cast<double>(acc) / static_cast<double>(tries) : 0.0;
  }

 private:
  struct Particle {
    State state;
    LikelihoodValue value;
    int level = 0;
    Rng rng;
  };

  // one step's bookkeeping, kept separate so worker threads can batch it
  struct StepBook {
    int try_level = 0;
    bool accepted = false;
    int visit_level = -1;  // post-move level; -1 when it is the top level
    bool exceeded = false;
  };

  struct LevelDelta {
    std::uint64_t visits = 0, exceeds = 0, accepts = 0, tries = 0;
  };

  void initialize() {
    levels_.assign(1, make_level_zero());
    building_ = options_.max_num_levels > 1;
    weights_ = level_weights(1, options_.lambda, !building_);
    buffer_.clear();
    steps_ = 0;
    saves_ = 0;
    save_round_robin_ = 0;

    particles_.clear();
    particles_.reserve(options_.num_particles);
    for (int i = 0; i < options_.num_particles; ++i) {
      Rng rng(substream_seed(options_.seed, i + 1));
      State state = model_.from_prior(rng);
      const LikelihoodValue value{model_.log_likelihood(state), rng.rand()};
      check_value(value.log_l, state);
      particles_.push_back(Particle{std::move(state), value, 0, rng});
    }

    if (output_dir_) {
      samples_out_.open(*output_dir_ / "samples.csv");
      write_header(samples_out_);
      std::vector<std::string> cols{"sample_id", "level_index", "log_l", "tiebreak"};
      const auto model_cols = model_.column_names();
      cols.insert(cols.end(), model_cols.begin(), model_cols.end());
      samples_out_.columns(cols);
    }
  }

  void run_serial() {
    const auto max_saves = static_cast<std::uint64_t>(options_.max_num_saves);
    while (saves_ < max_saves) {
      for (auto& p : particles_) {
        ++steps_;
        const StepBook book = step_particle(p, levels_, weights_);
        levels_[book.try_level].tries += 1;
        levels_[book.try_level].accepts += book.accepted ? 1 : 0;
        if (book.visit_level >= 0) {
          levels_[book.visit_level].visits += 1;
          levels_[book.visit_level].exceeds += book.exceeded ? 1 : 0;
        }
        if (building_ && p.value > levels_.back().threshold) push_buffer(p.value);
        maybe_create_levels();
        if (++steps_since_refine_ >= refine_interval_) {
          refine_log_x(levels_);
          steps_since_refine_ = 0;
        }
        if (steps_ % static_cast<std::uint64_t>(options_.save_interval) == 0) {
          save_particle(p);
          if (saves_ >= max_saves) break;
        }
        if (steps_ % progress_interval_ == 0) progress_line(false);
      }
    }
  }

  void run_threaded() {
    const int num_particles = options_.num_particles;
    const int num_workers = std::min(threads_, num_particles);
    constexpr int superstep = 64;  // particle steps between syncs
    const auto max_saves = static_cast<std::uint64_t>(options_.max_num_saves);

    while (saves_ < max_saves) {
      const std::vector<Level> snapshot = levels_;
      const std::vector<double> snapshot_weights = weights_;
      const bool snapshot_building = building_;

      std::vector<std::vector<LevelDelta>> deltas(
          num_workers, std::vector<LevelDelta>(snapshot.size()));
      std::vector<std::vector<LikelihoodValue>> candidates(num_workers);
      std::vector<std::exception_ptr> failures(num_workers);

      std::vector<std::thread> workers;
      workers.reserve(num_workers);
      for (int w = 0; w < num_workers; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (int i = w; i < num_particles; i += num_workers) {
              auto& p = particles_[i];
              for (int s = 0; s < superstep; ++s) {
                const StepBook book = step_particle(p, snapshot, snapshot_weights);
                deltas[w][book.try_level].tries += 1;
                deltas[w][book.try_level].accepts += book.accepted ? 1 : 0;
                if (book.visit_level >= 0) {
                  deltas[w][book.visit_level].visits += 1;
                  deltas[w][book.visit_level].exceeds += book.exceeded ? 1 : 0;
                }
                if (snapshot_building && p.value > snapshot.back().threshold)
                  candidates[w].push_back(p.value);
              }
            }
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
      for (auto& t : workers) t.join();
      for (auto& e : failures)
        if (e) std::rethrow_exception(e);

      for (int w = 0; w < num_workers; ++w) {
        for (std::size_t j = 0; j < snapshot.size(); ++j) {
          levels_[j].visits += deltas[w][j].visits;
          levels_[j].exceeds += deltas[w][j].exceeds;
          levels_[j].accepts += deltas[w][j].accepts;
          levels_[j].tries += deltas[w][j].tries;
        }
        if (building_)
          for (const auto& v : candidates[w]) push_buffer(v);
      }
      steps_ += static_cast<std::uint64_t>(num_particles) * superstep;
      maybe_create_levels();
      refine_log_x(levels_);

      const std::uint64_t due = steps_ / static_cast<std::uint64_t>(options_.save_interval);
      while (saves_ < due && saves_ < max_saves) {
        save_particle(particles_[save_round_robin_ % particles_.size()]);
        ++save_round_robin_;
      }
      if (steps_ % progress_interval_ < static_cast<std::uint64_t>(num_particles) * superstep)
        progress_line(false);
    }
  }

  // One Metropolis move of the particle followed by one move of its level
  // index. The particle move accepts when the prior factor allows it AND the
  // proposed value beats the current level threshold; on rejection the state
  // copy is simply discarded, which also rolls back any cached mock signal.
  StepBook step_particle(Particle& p, const std::vector<Level>& levels,
                         const std::vector<double>& weights) {
    StepBook book;
    book.try_level = p.level;

    State trial = p.state;
    const double logh = model_.perturb(trial, p.rng);
    LikelihoodValue proposed{model_.log_likelihood(trial),
                             heavy_step_unit(p.value.tiebreak, p.rng)};
    check_value(proposed.log_l, trial);
    const double u = p.rng.rand();  // drawn unconditionally to keep streams aligned

    bool accept = proposed > levels[p.level].threshold;
    if (accept && logh < 0.0) accept = (u == 0.0) || (std::log(u) < logh);
    if (accept) {
      p.state = std::move(trial);
      p.value = proposed;
      book.accepted = true;
    }

    p.level = index_move(p.level, p.value, levels, weights,
                         building_ ? options_.beta : 0.0, p.rng);

    // visits/exceeds estimate the mass ratio to the next level, so they are
    // recorded at the post-move level and only while a next level exists
    if (p.level + 1 < static_cast<int>(levels.size())) {
      book.visit_level = p.level;
      book.exceeded = p.value > levels[p.level + 1].threshold;
    }
    return book;
  }

  void push_buffer(const LikelihoodValue& v) {
    if (buffer_.empty()) {
      buffer_min_logl_ = buffer_max_logl_ = v.log_l;
    } else {
      buffer_min_logl_ = std::min(buffer_min_logl_, v.log_l);
      buffer_max_logl_ = std::max(buffer_max_logl_, v.log_l);
    }
    buffer_.push_back(v);
  }

  // Cut a new threshold at the (1 - e^-1) quantile of the buffer once enough
  // qualifying records exist. A buffer whose log-likelihoods are all equal
  // never cuts a level: under a constant likelihood the engine must stay at
  // level 0 rather than compress on tiebreaks alone.
  void maybe_create_levels() {
    while (building_ &&
           buffer_.size() >= static_cast<std::size_t>(options_.new_level_interval) &&
           buffer_max_logl_ > buffer_min_logl_) {
      Level lev;
      lev.threshold = create_level(buffer_);
      lev.log_x = levels_.back().log_x - 1.0;
      levels_.push_back(lev);
      refine_log_x(levels_);
      if (static_cast<int>(levels_.size()) >= options_.max_num_levels) {
        building_ = false;
        buffer_.clear();
        buffer_.shrink_to_fit();
      } else {
        rescan_buffer_bounds();
      }
      weights_ = level_weights(static_cast<int>(levels_.size()), options_.lambda, !building_);
      write_levels_file();
      progress_line(false);
    }
  }

  void rescan_buffer_bounds() {
    if (buffer_.empty()) return;
    buffer_min_logl_ = buffer_max_logl_ = buffer_[0].log_l;
    for (const auto& v : buffer_) {
      buffer_min_logl_ = std::min(buffer_min_logl_, v.log_l);
      buffer_max_logl_ = std::max(buffer_max_logl_, v.log_l);
    }
  }

  void save_particle(Particle& p) {
    flat_.clear();
    model_.serialize(p.state, flat_);
    SampleRecord rec{saves_, p.level, p.value};
    if (saves_ % 100 == 0) spot_check(rec, flat_);
    if (samples_out_.is_open()) {
      row_.clear();
      row_.push_back(static_cast<double>(rec.sample_id));
      row_.push_back(static_cast<double>(rec.level_index));
      row_.push_back(rec.value.log_l);
      row_.push_back(rec.value.tiebreak);
      row_.insert(row_.end(), flat_.begin(), flat_.end());
      samples_out_.row(row_);
    }
    if (save_hook_) save_hook_(rec, flat_);
    ++saves_;
    if (saves_ % 1000 == 0 && samples_out_.is_open()) {
      samples_out_.flush();
      write_levels_file();
    }
  }

  // Recompute the likelihood from the serialized state; catches stale or
  // drifting model caches during the run rather than in postprocessing.
  void spot_check(const SampleRecord& rec, const std::vector<double>& flat) {
    State recon = model_.state_from_flat(flat);
    const double fresh = model_.log_likelihood(recon);
    const double tol = 1e-6 * std::max(1.0, std::fabs(rec.value.log_l));
    if (!(std::fabs(fresh - rec.value.log_l) <= tol)) {
      throw NumericError("cache-consistency check failed at save " +
                         std::to_string(rec.sample_id) + ": stored log_l " +
                         format_double(rec.value.log_l) + " vs recomputed " +
                         format_double(fresh));
    }
  }

  void check_value(double log_l, const State& state) {
    if (!std::isnan(log_l)) return;
    std::vector<double> flat;
    model_.serialize(state, flat);
    std::string msg = "log-likelihood returned NaN; offending state:";
    for (double v : flat) {
      msg += ' ';
      msg += format_double(v);
    }
    throw NumericError(msg);
  }

  void write_header(CsvWriter& out) {
    out.comment(version_string);
    out.comment("seed = " + std::to_string(options_.seed));
    out.comment_block(options_.format());
  }

  void write_levels_file() {
    if (!output_dir_) return;
    CsvWriter out(*output_dir_ / "levels.csv");
    write_header(out);
    out.columns({"level_index", "log_x", "log_l_threshold", "tiebreak_threshold", "visits",
                 "exceeds", "accepts", "tries"});
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const Level& lev = levels_[j];
      const double row[8] = {static_cast<double>(j),
                             lev.log_x,
                             lev.threshold.log_l,
                             lev.threshold.tiebreak,
                             static_cast<double>(lev.visits),
                             static_cast<double>(lev.exceeds),
                             static_cast<double>(lev.accepts),
                             static_cast<double>(lev.tries)};
      out.row(row);
    }
  }

  void progress_line(bool final) {
    if (!progress_) return;
    const int top = static_cast<int>(levels_.size()) - 1;
    const int band = std::max(1, (top + 1) / 4);
    std::ostream& out = *progress_;
    out << (final ? "done:" : "progress:") << " steps=" << steps_ << " saves=" << saves_
        << " levels=" << levels_.size() << (building_ ? " (building)" : " (complete)")
        << " top_log_l=" << format_double(levels_.back().threshold.log_l)
        << " top_log_x=" << format_double(levels_.back().log_x) << " acc%=";
    for (int b = 0; b * band <= top; ++b) {
      if (b) out << '/';
      out << format_double(100.0 * acceptance_fraction(b * band,
                                                       std::min(top, (b + 1) * band - 1)));
    }
    out << '\n';
  }

  M model_;
  Options options_;
  std::optional<std::filesystem::path> output_dir_;
  SaveHook save_hook_;
  std::ostream* progress_ = nullptr;
  int threads_ = 1;

  std::vector<Particle> particles_;
  std::vector<Level> levels_;
  std::vector<double> weights_;
  std::vector<LikelihoodValue> buffer_;
  double buffer_min_logl_ = 0.0, buffer_max_logl_ = 0.0;
  bool building_ = true;
  std::uint64_t steps_ = 0;
  std::uint64_t saves_ = 0;
  std::uint64_t save_round_robin_ = 0;
  int steps_since_refine_ = 0;
  static constexpr int refine_interval_ = 100;
  static constexpr std::uint64_t progress_interval_ = 200000;

  CsvWriter samples_out_;
  std::vector<double> flat_;
  std::vector<double> row_;
};

}  // namespace tdns
