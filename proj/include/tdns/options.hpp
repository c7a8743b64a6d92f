#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tdns {

// Run configuration. File keys mirror these field names exactly; unknown
// keys are rejected so typos cannot silently fall back to defaults.
struct Options {
  int num_particles = 1;
  int new_level_interval = 10000;  // qualifying likelihood records per level
  int save_interval = 10000;       // steps between saved samples
  int max_num_levels = 100;        // total including level 0
  double lambda = 10.0;            // level-weight backbone scale
  double beta = 10.0;              // visit-enforcement strength while building
  int max_num_saves = 10000;
  std::uint64_t seed = 0;

  void validate() const;  // throws UsageError on nonpositive values

  // One "key = value" per line, in declaration order.
  std::string format() const;
};

Options parse_options_text(const std::string& text);
Options load_options_file(const std::filesystem::path& path);

}  // namespace tdns
