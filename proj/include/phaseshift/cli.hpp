#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "phaseshift/configuration.hpp"
#include "phaseshift/global_search.hpp"

// Command-line front end: shifts | phi | search | compare.
namespace phaseshift::cli {

enum class Method { matrix, ode };

struct RunConfig {
  double k = 0.0;
  bool k_set = false;
  int l_max = 20;
  int l_start = 1;
  int l_end = 20;
  double coupling = 1.0;
  bool inverse_energy = false;  // coupling = 1/k^2
  Method method = Method::matrix;
  int precision = 6;
  int ode_steps = 20000;

  Configuration layers;         // candidate (or the only) potential
  Configuration target_layers;  // original potential
  bool target_layers_set = false;
  std::string target_shifts;  // CSV l,delta
  std::string from_results;   // candidate taken from a results file
  std::size_t rank = 1;

  SearchParams search;
  bool seed_from_time = false;

  std::string output = "search_results.txt";
  std::string csv;

  double effective_coupling() const;
};

// Applies one `key = value` setting. `where` prefixes error messages
// (e.g. "run.cfg:12"). Throws ValidationError.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value,
                   const std::string& where);

// Key-value text: `key = value`, `#` comments, `layer = r,v` and
// `target_layer = r,v` repeated in order.
void parse_config_text(RunConfig& cfg, std::string_view text, const std::string& source);
void parse_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Fortran-style E format with `digits` significant digits: -0.220024E+00.
std::string format_fortran(double x, int digits = 6);
// Shortest text that reads back to the same double.
std::string format_exact(double x);

// "r1:v1,r2:v2,..."; empty string for no layers.
std::string format_layers(const Configuration& c);
Configuration parse_layers(std::string_view text, const std::string& where);

struct ResultEntry {
  double phi = 0.0;
  Configuration config;
};

std::string format_results(const SearchOutcome& outcome, const std::string& header);
std::vector<ResultEntry> parse_results(std::string_view text, const std::string& source);
std::vector<ResultEntry> read_results(const std::filesystem::path& path);

// Writes through a temporary sibling and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Exit codes: 0 ok, 2 invalid input, 3 solver failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phaseshift::cli
