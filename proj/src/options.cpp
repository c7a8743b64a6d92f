#include "tdns/options.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "tdns/errors.hpp"

namespace tdns {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail()) throw UsageError("options: bad value for '" + key + "': " + value);
  std::string rest;
  in >> rest;
  if (!rest.empty()) throw UsageError("options: trailing junk after '" + key + "': " + value);
  return out;
}

}  // namespace

void Options::validate() const {
  auto positive = [](const char* name, auto v) {
    if (!(v > 0)) throw UsageError(std::string("options: ") + name + " must be positive");
  };
  positive("num_particles", num_particles);
  positive("new_level_interval", new_level_interval);
  positive("save_interval", save_interval);
  positive("max_num_levels", max_num_levels);
  positive("lambda", lambda);
  positive("max_num_saves", max_num_saves);
  if (beta < 0.0) throw UsageError("options: beta must be >= 0");
}

std::string Options::format() const {
  std::ostringstream out;
  out << "num_particles = " << num_particles << '\n'
      << "new_level_interval = " << new_level_interval << '\n'
      << "save_interval = " << save_interval << '\n'
      << "max_num_levels = " << max_num_levels << '\n'
      << "lambda = " << lambda << '\n'
      << "beta = " << beta << '\n'
      << "max_num_saves = " << max_num_saves << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

Options parse_options_text(const std::string& text) {
  Options opts;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("options: line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "num_particles")
      opts.num_particles = parse_number<int>(key, value);
    else if (key == "new_level_interval")
      opts.new_level_interval = parse_number<int>(key, value);
    else if (key == "save_interval")
      opts.save_interval = parse_number<int>(key, value);
    else if (key == "max_num_levels")
      opts.max_num_levels = parse_number<int>(key, value);
    else if (key == "lambda")
      opts.lambda = parse_number<double>(key, value);
    else if (key == "beta")
      opts.beta = parse_number<double>(key, value);
    else if (key == "max_num_saves")
      opts.max_num_saves = parse_number<int>(key, value);
    else if (key == "seed")
      opts.seed = parse_number<std::uint64_t>(key, value);
    else
      throw UsageError("options: unknown key '" + key + "'");
  }
  opts.validate();
  return opts;
}

Options load_options_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("options: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_options_text(buf.str());
}

}  // namespace tdns
